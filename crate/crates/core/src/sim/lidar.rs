use super::{Pose, RobotSpec, SimError, World};

/// Noise-free planar LiDAR sweep centred on the robot heading.
///
/// Beam `i` points at `heading − fov/2 + i·fov/(n−1)`; a single-beam
/// sensor looks straight ahead. Ranges are clipped to `lidar_range_max`.
pub fn raycast(world: &World, origin: &Pose, spec: &RobotSpec) -> Result<Vec<f64>, SimError> {
    if !(origin.x.is_finite() && origin.y.is_finite() && origin.heading.is_finite()) {
        return Err(SimError::NonFinite("raycast origin"));
    }
    let o = origin.position();
    if !world.inside_bounds(o) {
        return Err(SimError::InvalidPose(format!("({:.3}, {:.3}) lies outside {}", o.x, o.y, world.name)));
    }
    let n = spec.lidar_beam_count;
    let step = if n > 1 { spec.lidar_fov / (n - 1) as f64 } else { 0.0 };
    let first = if n > 1 { origin.heading - spec.lidar_fov / 2.0 } else { origin.heading };
    let ranges = (0..n)
        .map(|i| {
            let bearing = first + i as f64 * step;
            let (dy, dx) = bearing.sin_cos();
            let mut best = wall_distance(world, o.x, o.y, dx, dy);
            for s in &world.obstacles {
                if let Some(t) = s.ray_hit(o, dx, dy) {
                    best = best.min(t);
                }
            }
            best.clamp(0.0, spec.lidar_range_max)
        })
        .collect();
    Ok(ranges)
}

fn wall_distance(world: &World, x: f64, y: f64, dx: f64, dy: f64) -> f64 {
    let tx = if dx > 1e-15 {
        (world.width - x) / dx
    } else if dx < -1e-15 {
        -x / dx
    } else {
        f64::INFINITY
    };
    let ty = if dy > 1e-15 {
        (world.height - y) / dy
    } else if dy < -1e-15 {
        -y / dy
    } else {
        f64::INFINITY
    };
    tx.min(ty).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Circle, Point, Rect, Shape};
    use proptest::prelude::*;

    fn forward_spec(range: f64) -> RobotSpec {
        RobotSpec { lidar_beam_count: 3, lidar_fov: std::f64::consts::PI, lidar_range_max: range, ..Default::default() }
    }

    #[test]
    fn forward_beam_hits_wall() {
        let w = World::empty("e", 4.0, 4.0).unwrap();
        let r = raycast(&w, &Pose::new(2.0, 2.0, 0.0), &forward_spec(30.0)).unwrap();
        assert!((r[1] - 2.0).abs() < 1e-12);
        // side beams look at ±90°
        assert!((r[0] - 2.0).abs() < 1e-12 && (r[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn forward_beam_hits_circle() {
        let c = Shape::Circle(Circle { center: Point::new(4.0, 2.0), radius: 0.5 });
        let w = World::new("c", 8.0, 4.0, vec![c]).unwrap();
        let r = raycast(&w, &Pose::new(1.0, 2.0, 0.0), &forward_spec(30.0)).unwrap();
        assert!((r[1] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn clipped_to_range_max() {
        let w = World::empty("big", 100.0, 100.0).unwrap();
        let r = raycast(&w, &Pose::new(50.0, 50.0, 0.0), &forward_spec(30.0)).unwrap();
        assert!(r.iter().all(|&v| v == 30.0));
    }

    #[test]
    fn beam_bearings_span_fov() {
        // 270° over 108 beams: first beam points 135° right of heading
        let w = World::empty("e", 10.0, 10.0).unwrap();
        let spec = RobotSpec::default();
        let r = raycast(&w, &Pose::new(5.0, 5.0, std::f64::consts::FRAC_PI_2), &spec).unwrap();
        assert_eq!(r.len(), 108);
        let expected_first = 5.0 / (std::f64::consts::FRAC_PI_4).cos();
        assert!((r[0] - expected_first).abs() < 1e-9);
    }

    #[test]
    fn origin_outside_is_error() {
        let w = World::empty("e", 4.0, 4.0).unwrap();
        assert!(matches!(raycast(&w, &Pose::new(5.0, 1.0, 0.0), &forward_spec(30.0)), Err(SimError::InvalidPose(_))));
    }

    proptest! {
        #[test]
        fn adding_obstacle_never_increases_range(
            px in 0.5..9.5f64, py in 0.5..9.5f64, h in -3.1..3.1f64,
            ox in 0.0..10.0f64, oy in 0.0..10.0f64, size in 0.05..2.0f64, circle in any::<bool>(),
        ) {
            let base = World::empty("e", 10.0, 10.0).unwrap();
            let shape = if circle {
                Shape::Circle(Circle { center: Point::new(ox, oy), radius: size })
            } else {
                Shape::Rect(Rect { x: ox, y: oy, w: size, h: size / 2.0 })
            };
            let more = World::new("m", 10.0, 10.0, vec![shape]).unwrap();
            let spec = RobotSpec { lidar_beam_count: 36, ..Default::default() };
            let pose = Pose::new(px, py, h);
            let a = raycast(&base, &pose, &spec).unwrap();
            let b = raycast(&more, &pose, &spec).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!(y <= x);
            }
        }
    }
}
