//! Pinhole camera with a world pose: normalized-pixel projection and
//! ground-plane ray casting.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Depth below which a point counts as behind the camera plane.
const MIN_DEPTH: f64 = 1e-9;

/// Pinhole intrinsics plus a world pose.
///
/// Camera frame convention: +Z along the optical axis, +X right, +Y down.
/// World frame: z up.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CameraModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
    /// Camera center in world coordinates, meters.
    pub position: [f64; 3],
    /// Camera-to-world rotation, row-major.
    pub rotation: [[f64; 3]; 3],
}

impl CameraModel {
    /// A camera at `position` with its optical axis at world heading `yaw`
    /// (radians, x toward yaw 0) tilted `pitch_down` radians toward the
    /// ground.
    pub fn with_pose(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: u32,
        height: u32,
        position: [f64; 3],
        yaw: f64,
        pitch_down: f64,
    ) -> Result<Self> {
        if !(fx > 0.0 && fy > 0.0) {
            return Err(CoreError::InvalidParam("focal lengths must be positive".into()));
        }
        let (sy, cyaw) = yaw.sin_cos();
        let (sp, cp) = pitch_down.sin_cos();
        let forward = [cyaw * cp, sy * cp, -sp];
        let right = [sy, -cyaw, 0.0];
        let down = [-sp * cyaw, -sp * sy, -cp];
        // Columns are the camera axes expressed in world coordinates.
        let rotation = [
            [right[0], down[0], forward[0]],
            [right[1], down[1], forward[1]],
            [right[2], down[2], forward[2]],
        ];
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
            position,
            rotation,
        })
    }

    /// The default benchmark camera: 640x480, ~90 degree horizontal FOV.
    pub fn standard(position: [f64; 3], yaw: f64, pitch_down: f64) -> Self {
        Self::with_pose(320.0, 320.0, 320.0, 240.0, 640, 480, position, yaw, pitch_down)
            .expect("valid fixed intrinsics")
    }

    fn world_to_cam(&self, p: [f64; 3]) -> [f64; 3] {
        let d = [
            p[0] - self.position[0],
            p[1] - self.position[1],
            p[2] - self.position[2],
        ];
        // R^T d (columns of R are the camera axes).
        [
            self.rotation[0][0] * d[0] + self.rotation[1][0] * d[1] + self.rotation[2][0] * d[2],
            self.rotation[0][1] * d[0] + self.rotation[1][1] * d[1] + self.rotation[2][1] * d[2],
            self.rotation[0][2] * d[0] + self.rotation[1][2] * d[1] + self.rotation[2][2] * d[2],
        ]
    }

    fn cam_to_world_dir(&self, d: [f64; 3]) -> [f64; 3] {
        [
            self.rotation[0][0] * d[0] + self.rotation[0][1] * d[1] + self.rotation[0][2] * d[2],
            self.rotation[1][0] * d[0] + self.rotation[1][1] * d[1] + self.rotation[1][2] * d[2],
            self.rotation[2][0] * d[0] + self.rotation[2][1] * d[1] + self.rotation[2][2] * d[2],
        ]
    }

    /// Project a world point to normalized pixel coordinates in [0,1]^2.
    ///
    /// Points behind the camera plane or outside the frame return `None`.
    pub fn project_to_pixel(&self, world: [f64; 3]) -> Option<(f64, f64)> {
        let pc = self.world_to_cam(world);
        if pc[2] < MIN_DEPTH {
            return None;
        }
        let u = (self.fx * pc[0] / pc[2] + self.cx) / f64::from(self.width);
        let v = (self.fy * pc[1] / pc[2] + self.cy) / f64::from(self.height);
        if (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v) {
            Some((u, v))
        } else {
            None
        }
    }

    /// Cast a normalized pixel's ray onto the z = 0 ground plane.
    ///
    /// Rays parallel to the plane, pointing away from it, or starting below
    /// it return `None`.
    pub fn backproject_to_ground(&self, u: f64, v: f64) -> Option<(f64, f64)> {
        let d_cam = [
            (u * f64::from(self.width) - self.cx) / self.fx,
            (v * f64::from(self.height) - self.cy) / self.fy,
            1.0,
        ];
        let d = self.cam_to_world_dir(d_cam);
        if d[2].abs() < MIN_DEPTH {
            return None;
        }
        let t = -self.position[2] / d[2];
        if t <= MIN_DEPTH {
            return None;
        }
        Some((self.position[0] + t * d[0], self.position[1] + t * d[1]))
    }
}
