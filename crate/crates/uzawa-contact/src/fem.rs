//! Benchmark generator: a plane-stress rectangular body meshed with Q4
//! elements, left edge fixed, bottom edge resting on a rigid obstacle,
//! tractions on the top and right edges.
//!
//! Node and DOF ordering (documented so instance files are portable):
//! nodes live on an `(nx+1) x (ny+1)` grid, node `(ix, iy)` has index
//! `ix * (ny + 1) + iy` (column-major, x first), coordinates
//! `(ix * width / nx, iy * height / ny)`. Each node carries two DOFs,
//! horizontal then vertical. The left edge (`ix = 0`) is fully fixed and
//! removed from the system; free node `(ix, iy)` with `ix >= 1` maps to
//! DOFs `2 * ((ix - 1) * (ny + 1) + iy)` and the same `+ 1`.
//! Contact candidates are the bottom nodes `ix = 1..=nx`, so `m = nx`
//! and `d = 2 * nx * (ny + 1)`.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SymMatrix};
use crate::problem::ContactQp;
use serde::{Deserialize, Serialize};

/// Mesh, material and load parameters. Units are N/mm/MPa so all
/// quantities stay O(1)-O(1e5).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub nx: usize,
    pub ny: usize,
    pub width: f64,
    pub height: f64,
    pub thickness: f64,
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// Uniform traction on the top edge, positive = downward (MPa).
    pub top_traction: f64,
    /// Uniform traction on the right edge, positive = upward (MPa).
    pub right_traction: f64,
}

impl BenchmarkSpec {
    fn validate(&self) {
        assert!(self.nx >= 1 && self.ny >= 1, "mesh must have at least one element");
        assert!(
            self.width > 0.0 && self.height > 0.0 && self.thickness > 0.0,
            "geometry must be positive"
        );
        assert!(self.youngs_modulus > 0.0, "Young's modulus must be positive");
        assert!(
            (0.0..0.5).contains(&self.poisson_ratio),
            "Poisson ratio must lie in [0, 0.5)"
        );
    }
}

/// The benchmark constants: 60 x 20 x 5 mm body, E = 200 GPa, nu = 0.3,
/// `ny = nx / 3`, 50 kPa pressing down on the top edge and 33 kPa
/// pulling up on the right edge. At this load ratio the right 26.7% of
/// the bottom edge separates from the obstacle at equilibrium, so 22 of
/// 30 candidate nodes carry reactions on the (30, 10) mesh; a stronger
/// upward pull lifts the whole bottom edge off and the contact problem
/// degenerates to the unconstrained one.
pub fn paper_spec(nx: usize) -> Result<BenchmarkSpec> {
    if nx == 0 || !nx.is_multiple_of(3) {
        return Err(Error::InvalidMeshRatio { nx });
    }
    Ok(BenchmarkSpec {
        nx,
        ny: nx / 3,
        width: 60.0,
        height: 20.0,
        thickness: 5.0,
        youngs_modulus: 200_000.0,
        poisson_ratio: 0.3,
        top_traction: 0.05,
        right_traction: 0.033,
    })
}

const GAUSS: f64 = 0.577_350_269_189_625_8; // 1 / sqrt(3)

/// Plane-stress Q4 element stiffness via 2x2 Gauss quadrature.
/// `coords` are the four corners, counterclockwise.
pub fn q4_element_stiffness(
    youngs_modulus: f64,
    poisson_ratio: f64,
    thickness: f64,
    coords: &[[f64; 2]; 4],
) -> Result<SymMatrix> {
    let e = youngs_modulus;
    let nu = poisson_ratio;
    let c = e / (1.0 - nu * nu);
    // plane-stress constitutive matrix
    let d = [
        [c, c * nu, 0.0],
        [c * nu, c, 0.0],
        [0.0, 0.0, c * (1.0 - nu) / 2.0],
    ];

    let mut ke = vec![0.0; 64];
    for &xi in &[-GAUSS, GAUSS] {
        for &eta in &[-GAUSS, GAUSS] {
            // shape function derivatives w.r.t. (xi, eta)
            let dxi = [
                -(1.0 - eta) / 4.0,
                (1.0 - eta) / 4.0,
                (1.0 + eta) / 4.0,
                -(1.0 + eta) / 4.0,
            ];
            let deta = [
                -(1.0 - xi) / 4.0,
                -(1.0 + xi) / 4.0,
                (1.0 + xi) / 4.0,
                (1.0 - xi) / 4.0,
            ];
            let mut j = [[0.0; 2]; 2];
            for a in 0..4 {
                j[0][0] += dxi[a] * coords[a][0];
                j[0][1] += dxi[a] * coords[a][1];
                j[1][0] += deta[a] * coords[a][0];
                j[1][1] += deta[a] * coords[a][1];
            }
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det <= 0.0 {
                return Err(Error::DegenerateElement);
            }
            let jinv = [
                [j[1][1] / det, -j[0][1] / det],
                [-j[1][0] / det, j[0][0] / det],
            ];
            // B (3 x 8): strain-displacement at this Gauss point
            let mut b = [[0.0; 8]; 3];
            for a in 0..4 {
                let dnx = jinv[0][0] * dxi[a] + jinv[0][1] * deta[a];
                let dny = jinv[1][0] * dxi[a] + jinv[1][1] * deta[a];
                b[0][2 * a] = dnx;
                b[1][2 * a + 1] = dny;
                b[2][2 * a] = dny;
                b[2][2 * a + 1] = dnx;
            }
            // ke += t * B^T D B * det (unit Gauss weights)
            for p in 0..8 {
                for q in 0..8 {
                    let mut s = 0.0;
                    for r in 0..3 {
                        for t in 0..3 {
                            s += b[r][p] * d[r][t] * b[t][q];
                        }
                    }
                    ke[p * 8 + q] += thickness * s * det;
                }
            }
        }
    }
    SymMatrix::from_row_major(8, ke)
}

/// Per-node vertical forces from the top and right edge tractions, over
/// the full node grid (fixed nodes included). Uniform traction on a
/// linear edge lumps half the edge resultant to each edge node.
fn edge_loads(spec: &BenchmarkSpec) -> (Vec<f64>, Vec<f64>) {
    let n_nodes = (spec.nx + 1) * (spec.ny + 1);
    let node = |ix: usize, iy: usize| ix * (spec.ny + 1) + iy;
    let lx = spec.width / spec.nx as f64;
    let ly = spec.height / spec.ny as f64;

    let mut top = vec![0.0; n_nodes];
    let half_top = spec.top_traction * spec.thickness * lx / 2.0;
    for ex in 0..spec.nx {
        top[node(ex, spec.ny)] -= half_top;
        top[node(ex + 1, spec.ny)] -= half_top;
    }

    let mut right = vec![0.0; n_nodes];
    let half_right = spec.right_traction * spec.thickness * ly / 2.0;
    for ey in 0..spec.ny {
        right[node(spec.nx, ey)] += half_right;
        right[node(spec.nx, ey + 1)] += half_right;
    }
    (top, right)
}

/// Assembles the benchmark instance: `d = 2 nx (ny + 1)` free DOFs,
/// `m = nx` contact candidates with `N` rows selecting vertical bottom
/// displacements with coefficient -1 and `h = 0`.
pub fn build_benchmark(spec: &BenchmarkSpec) -> Result<ContactQp> {
    spec.validate();
    let (nx, ny) = (spec.nx, spec.ny);
    let d = 2 * nx * (ny + 1);
    let m = nx;

    // free DOF of node (ix, iy): None when fixed (left edge)
    let free_dof = |ix: usize, iy: usize, vertical: bool| -> Option<usize> {
        if ix == 0 {
            return None;
        }
        Some(2 * ((ix - 1) * (ny + 1) + iy) + usize::from(vertical))
    };

    // all elements are congruent rectangles, one stiffness serves all
    let lx = spec.width / nx as f64;
    let ly = spec.height / ny as f64;
    let corners = [[0.0, 0.0], [lx, 0.0], [lx, ly], [0.0, ly]];
    let ke = q4_element_stiffness(
        spec.youngs_modulus,
        spec.poisson_ratio,
        spec.thickness,
        &corners,
    )?;

    let mut k = SymMatrix::zeros(d);
    for ex in 0..nx {
        for ey in 0..ny {
            let elem_nodes = [(ex, ey), (ex + 1, ey), (ex + 1, ey + 1), (ex, ey + 1)];
            let mut dofs = [None; 8];
            for (a, &(ix, iy)) in elem_nodes.iter().enumerate() {
                dofs[2 * a] = free_dof(ix, iy, false);
                dofs[2 * a + 1] = free_dof(ix, iy, true);
            }
            for p in 0..8 {
                let Some(gp) = dofs[p] else { continue };
                for (q, dq) in dofs.iter().enumerate().skip(p) {
                    let Some(gq) = *dq else { continue };
                    let v = ke.get(p, q);
                    if gp <= gq {
                        k.add_symmetric(gp, gq, v);
                    } else {
                        k.add_symmetric(gq, gp, v);
                    }
                }
            }
        }
    }

    // loads: vertical nodal forces from the two loaded edges
    let (top, right) = edge_loads(spec);
    let mut p = vec![0.0; d];
    for ix in 1..=nx {
        for iy in 0..=ny {
            let node = ix * (ny + 1) + iy;
            let dof = free_dof(ix, iy, true).unwrap();
            p[dof] += top[node] + right[node];
        }
    }

    // contact constraints: g_i = u_vertical at bottom node i
    let mut n = DenseMatrix::zeros(m, d);
    for (i, ix) in (1..=nx).enumerate() {
        let dof = free_dof(ix, 0, true).unwrap();
        n.set(i, dof, -1.0);
    }
    let h = vec![0.0; m];

    ContactQp::new(k, p, n, h)
}
