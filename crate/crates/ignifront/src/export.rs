//! CSV serialization. All numbers print with 17 significant digits, which
//! round-trips f64 exactly and keeps outputs byte-identical across runs.

use std::io::{self, Write};

use crate::front_solver::FrontSolution;
use crate::pde_verifier::{FrontSeries, Snapshot};
use crate::phase_plane::{PhasePortrait, SeparatrixTrajectory};
use crate::phi_curve::CurveSamples;

/// 17-significant-digit decimal form of a double.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

impl CurveSamples {
    /// Header "R,c,residual".
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "R,c,residual")?;
        for (&(r, c), &res) in self.points.iter().zip(&self.residuals) {
            writeln!(w, "{},{},{}", fmt_g17(r), fmt_g17(c), fmt_g17(res))?;
        }
        Ok(())
    }
}

impl SeparatrixTrajectory {
    /// Header "t,u,v".
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,u,v")?;
        for p in &self.samples {
            writeln!(w, "{},{},{}", fmt_g17(p.t), fmt_g17(p.u), fmt_g17(p.v))?;
        }
        Ok(())
    }
}

impl PhasePortrait {
    /// Header "u,v,du,dv".
    pub fn write_field_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "u,v,du,dv")?;
        for s in &self.field {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_g17(s.u),
                fmt_g17(s.v),
                fmt_g17(s.du),
                fmt_g17(s.dv)
            )?;
        }
        Ok(())
    }

    /// Header "side,u,v"; the three edges of the invariant triangle.
    pub fn write_boundary_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "side,u,v")?;
        for b in &self.boundary {
            writeln!(w, "{},{},{}", b.side, fmt_g17(b.u), fmt_g17(b.v))?;
        }
        Ok(())
    }
}

impl FrontSolution {
    /// Header "x,theta,theta_x" over a caller-supplied grid.
    pub fn write_profile_csv<W: Write>(&self, grid: &[f64], mut w: W) -> io::Result<()> {
        writeln!(w, "x,theta,theta_x")?;
        for &x in grid {
            let (theta, theta_x) = self.eval(x);
            writeln!(
                w,
                "{},{},{}",
                fmt_g17(x),
                fmt_g17(theta),
                fmt_g17(theta_x)
            )?;
        }
        Ok(())
    }
}

impl FrontSeries {
    /// Header "t,x_ig".
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,x_ig")?;
        for (&t, &x) in self.t.iter().zip(&self.x_ig) {
            writeln!(w, "{},{}", fmt_g17(t), fmt_g17(x))?;
        }
        Ok(())
    }
}

impl Snapshot {
    /// Header "x,theta".
    pub fn write_csv<W: Write>(&self, grid: &[f64], mut w: W) -> io::Result<()> {
        writeln!(w, "x,theta")?;
        for (&x, &theta) in grid.iter().zip(&self.theta) {
            writeln!(w, "{},{}", fmt_g17(x), fmt_g17(theta))?;
        }
        Ok(())
    }
}
