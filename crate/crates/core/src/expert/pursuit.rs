use super::{ExpertConfig, ExpertError};
use crate::sim::{normalize_angle, Action, Point, Pose, RobotSpec};

/// Point `lookahead` meters along `path` past the projection of `pos`.
pub fn lookahead_point(path: &[Point], pos: Point, lookahead: f64) -> Point {
    if path.len() == 1 {
        return path[0];
    }
    let mut best = (f64::INFINITY, 0usize, 0.0f64);
    for (k, w) in path.windows(2).enumerate() {
        let (dx, dy) = (w[1].x - w[0].x, w[1].y - w[0].y);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 { (((pos.x - w[0].x) * dx + (pos.y - w[0].y) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
        let proj = Point::new(w[0].x + t * dx, w[0].y + t * dy);
        let d = proj.dist(&pos);
        if d < best.0 {
            best = (d, k, t);
        }
    }
    let (_, mut k, t) = best;
    let mut from = {
        let (a, b) = (path[k], path[k + 1]);
        Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
    };
    let mut remaining = lookahead;
    loop {
        let to = path[k + 1];
        let seg = from.dist(&to);
        if seg >= remaining {
            let f = if seg > 0.0 { remaining / seg } else { 0.0 };
            return Point::new(from.x + f * (to.x - from.x), from.y + f * (to.y - from.y));
        }
        remaining -= seg;
        k += 1;
        if k + 1 >= path.len() {
            return *path.last().unwrap();
        }
        from = to;
    }
}

/// Pure-pursuit command toward the lookahead point.
pub fn expert_action(pose: &Pose, path: &[Point], cfg: &ExpertConfig, spec: &RobotSpec) -> Result<Action, ExpertError> {
    if path.is_empty() {
        return Err(ExpertError::Protocol("empty path".into()));
    }
    let target = lookahead_point(path, pose.position(), cfg.lookahead);
    let bearing = normalize_angle((target.y - pose.y).atan2(target.x - pose.x) - pose.heading);
    Ok(steer(bearing, cfg, spec))
}

/// Command for a target at relative bearing `phi`.
pub fn steer(phi: f64, cfg: &ExpertConfig, spec: &RobotSpec) -> Action {
    Action {
        v_cmd: cfg.speed_scale * spec.v_max * phi.cos().max(0.0),
        omega_cmd: (cfg.gain_heading * phi).clamp(-spec.omega_max, spec.omega_max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> ExpertConfig {
        ExpertConfig { gain_heading: 2.0, speed_scale: 1.0, ..Default::default() }
    }

    #[test]
    fn steering_cases() {
        let spec = RobotSpec::default();
        let a = steer(0.0, &cfg(), &spec);
        assert_eq!((a.v_cmd, a.omega_cmd), (0.5, 0.0));
        let a = steer(PI / 2.0, &cfg(), &spec);
        assert!(a.v_cmd.abs() < 1e-12);
        assert_eq!(a.omega_cmd, PI / 2.0);
        let a = steer(PI / 3.0, &cfg(), &spec);
        assert!((a.v_cmd - 0.25).abs() < 1e-12);
        assert_eq!(a.omega_cmd, PI / 2.0); // 2.094 clamped
    }

    #[test]
    fn lookahead_walks_along_path() {
        let path = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 2.0)];
        let p = lookahead_point(&path, Point::new(0.5, 0.1), 1.0);
        assert!((p.x - 1.0).abs() < 1e-12 && (p.y - 0.5).abs() < 1e-12);
        let end = lookahead_point(&path, Point::new(1.0, 1.9), 1.0);
        assert_eq!(end, Point::new(1.0, 2.0));
    }

    #[test]
    fn straight_ahead_goes_full_speed() {
        let spec = RobotSpec::default();
        let path = [Point::new(0.0, 0.0), Point::new(5.0, 0.0)];
        let a = expert_action(&Pose::new(0.0, 0.0, 0.0), &path, &cfg(), &spec).unwrap();
        assert_eq!(a, Action::new(0.5, 0.0));
        assert!(expert_action(&Pose::new(0.0, 0.0, 0.0), &[], &cfg(), &spec).is_err());
    }
}
