use super::{EvalError, EvalResult, Rollout};
use crate::sim::{Shape, Terminal, World};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

const PX_PER_M: f64 = 50.0;
const MARGIN: f64 = 10.0;

/// `t,x,y,heading,v,omega`, one row per pose.
pub fn trajectory_csv(r: &Rollout) -> String {
    let mut out = String::from("t,x,y,heading,v,omega\n");
    for (t, (p, v)) in r.poses.iter().zip(&r.velocities).enumerate() {
        let _ = writeln!(out, "{t},{:.6},{:.6},{:.6},{:.6},{:.6}", p.x, p.y, p.heading, v[0], v[1]);
    }
    out
}

/// World, trajectories and outcome markers for one trial of a result.
pub fn render_svg(world: &World, rollouts: &[Rollout], title: &str) -> String {
    let (w, h) = (world.width * PX_PER_M + 2.0 * MARGIN, world.height * PX_PER_M + 2.0 * MARGIN);
    let px = |x: f64| MARGIN + x * PX_PER_M;
    let py = |y: f64| MARGIN + (world.height - y) * PX_PER_M;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#);
    let _ = writeln!(s, "<title>{}</title>", xml_escape(title));
    s.push_str(concat!(
        "<style>.obstacle{fill:#777}.path{fill:none;stroke-width:1.5}.success{stroke:#2a9d8f}.collision{stroke:#d62828}",
        ".timeout{stroke:#f4a261}.start{fill:#1d4ed8}.goal{fill:#facc15}.reached{fill:#ec4899}",
        ".crash{stroke:#dc2626;stroke-width:2}.stall{fill:#dc2626}</style>\n"
    ));
    let _ = writeln!(s, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.3}" height="{:.3}" fill="white" stroke="black"/>"#, world.width * PX_PER_M, world.height * PX_PER_M);
    for o in &world.obstacles {
        match o {
            Shape::Rect(r) => {
                let _ = writeln!(s, r#"<rect class="obstacle" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#, px(r.x), py(r.y + r.h), r.w * PX_PER_M, r.h * PX_PER_M);
            }
            Shape::Circle(c) => {
                let _ = writeln!(s, r#"<circle class="obstacle" cx="{:.3}" cy="{:.3}" r="{:.3}"/>"#, px(c.center.x), py(c.center.y), c.radius * PX_PER_M);
            }
        }
    }
    for r in rollouts {
        let class = match r.terminal {
            Terminal::Success => "success",
            Terminal::Collision => "collision",
            _ => "timeout",
        };
        let pts: Vec<String> = r.poses.iter().map(|p| format!("{:.3},{:.3}", px(p.x), py(p.y))).collect();
        let _ = writeln!(s, r#"<polyline class="path {class}" points="{}"/>"#, pts.join(" "));
    }
    for r in rollouts {
        let _ = writeln!(s, r#"<circle class="start" cx="{:.3}" cy="{:.3}" r="5"/>"#, px(r.start.x), py(r.start.y));
        let _ = writeln!(s, r#"<circle class="goal" cx="{:.3}" cy="{:.3}" r="5"/>"#, px(r.goal.x), py(r.goal.y));
        let end = r.poses.last().expect("rollouts hold the start pose");
        let (x, y) = (px(end.x), py(end.y));
        match r.terminal {
            Terminal::Success => {
                let _ = writeln!(s, r#"<circle class="reached" cx="{x:.3}" cy="{y:.3}" r="4"/>"#);
            }
            Terminal::Collision => {
                let _ = writeln!(s, r#"<path class="crash" d="M{:.3} {:.3}L{:.3} {:.3}M{:.3} {:.3}L{:.3} {:.3}"/>"#, x - 5.0, y - 5.0, x + 5.0, y + 5.0, x - 5.0, y + 5.0, x + 5.0, y - 5.0);
            }
            _ => {
                let _ = writeln!(s, r#"<polygon class="stall" points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}"/>"#, x, y - 6.0, x - 5.0, y + 4.0, x + 5.0, y + 4.0);
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `task_NNN.csv` for every task of trial 0 plus `trajectories.svg`.
pub fn export_trajectories(result: &EvalResult, world: &World, dir: &Path) -> Result<Vec<PathBuf>, EvalError> {
    let io = |p: &Path, e: std::io::Error| EvalError::Io(format!("{}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let runs = result.rollouts.first().ok_or_else(|| EvalError::Config("result has no trajectories".into()))?;
    let mut written = Vec::with_capacity(runs.len() + 1);
    for (i, r) in runs.iter().enumerate() {
        let path = dir.join(format!("task_{i:03}.csv"));
        std::fs::write(&path, trajectory_csv(r)).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    let path = dir.join("trajectories.svg");
    let title = format!("{} in {}", result.method, result.world);
    std::fs::write(&path, render_svg(world, runs, &title)).map_err(|e| io(&path, e))?;
    written.push(path);
    Ok(written)
}
