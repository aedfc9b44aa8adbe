//! Closed-form eigenvalue oracles for small integer symmetric matrices.

/// Roots of the characteristic polynomial of a symmetric 2×2 matrix.
pub fn eig2(a: f64, b: f64, d: f64) -> Vec<f64> {
    let mean = (a + d) / 2.0;
    let r = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    vec![mean + r, mean - r]
}

/// Eigenvalues of an integer symmetric 3×3 matrix from its characteristic
/// polynomial `λ³ − c₂λ² + c₁λ − c₀`. Integer roots are found exactly and
/// deflated; a repeated root of a monic integer cubic is always an integer,
/// so whatever remains has simple roots and is solved in closed form.
pub fn eig3(m: [[i64; 3]; 3]) -> Vec<f64> {
    let c2 = m[0][0] + m[1][1] + m[2][2];
    let c1 = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let c0 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    // Monic coefficients, highest degree first.
    let mut poly = vec![1, -c2, c1, -c0];
    let mut roots = Vec::new();
    let bound = 1 + poly.iter().map(|c: &i64| c.abs()).max().unwrap();
    let mut r = -bound;
    while r <= bound && poly.len() > 1 {
        if poly.iter().fold(0, |acc, &c| acc * r + c) == 0 {
            roots.push(r as f64);
            // Synthetic division by (λ − r); the remainder is zero.
            let mut q = Vec::with_capacity(poly.len() - 1);
            let mut acc = 0;
            for &c in &poly[..poly.len() - 1] {
                acc = acc * r + c;
                q.push(acc);
            }
            poly = q;
        } else {
            r += 1;
        }
    }
    let f: Vec<f64> = poly.iter().map(|&c| c as f64).collect();
    match f.len() {
        1 => {}
        2 => roots.push(-f[1]),
        3 => {
            let disc = (f[1] * f[1] - 4.0 * f[2]).sqrt();
            let q = -0.5 * (f[1] + f[1].signum() * disc);
            roots.push(q);
            roots.push(f[2] / q);
        }
        _ => {
            let (b, c, d) = (f[1], f[2], f[3]);
            let p = c - b * b / 3.0;
            let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
            let amp = 2.0 * (-p / 3.0).sqrt();
            let phi = ((3.0 * q / (p * amp)).clamp(-1.0, 1.0)).acos() / 3.0;
            for k in 0..3 {
                let mut x = amp * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - b / 3.0;
                for _ in 0..3 {
                    let value = ((x + b) * x + c) * x + d;
                    let slope = (3.0 * x + 2.0 * b) * x + c;
                    x -= value / slope;
                }
                roots.push(x);
            }
        }
    }
    roots.sort_by(|x, y| y.total_cmp(x));
    roots
}
