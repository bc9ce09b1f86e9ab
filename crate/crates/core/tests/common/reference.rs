//! Closed forms typed by hand; nothing here calls a library builder.

use gtcq_core::quantize::DiffOp;
use gtcq_core::symcore::{ex, Expr};

pub const AXES: [&str; 3] = ["x", "y", "z"];
pub const RHO: &str = "sqrt(x^2 + y^2)";

pub const INTRINSIC_CHAIN: [&str; 5] = [
    "p_lambda",
    "-(r - b)",
    "-p_r/m",
    "lambda/m - 1/m^2*(p_theta^2/r^3 + p_phi^2*sin(theta)/(a + r*sin(theta))^3)",
    "lambdadot/m - 3*a*p_theta*p_phi^2*cos(theta)/(m^3*r^2*(a + r*sin(theta))^4)",
];

pub fn cartesian_chain() -> [String; 5] {
    let q = format!("(a^2 - 2*a*{RHO} + x^2 + y^2 + z^2)");
    let lz = "(p_y*x - p_x*y)";
    [
        "p_lambda".to_string(),
        format!("-(a^2 - b^2 + x^2 + y^2 + z^2 - 2*a*{RHO})"),
        format!("-2*({RHO}*(p_x*x + p_y*y + p_z*z) - a*(p_x*x + p_y*y))/(m*{RHO})"),
        format!("4*lambda*{q}/m + 2*a*{lz}^2/(m^2*{RHO}^3) - 2*(p_x^2 + p_y^2 + p_z^2)/m^2"),
        format!("4*lambdadot*{q}/m - 6*a*(p_x*x + p_y*y)*{lz}^2/(m^3*{RHO}^5)"),
    ]
}

pub fn intrinsic_c_inv_12() -> Expr {
    ex("3/m*(p_theta^2/b^4 + p_phi^2*sin(theta)^2/(a + b*sin(theta))^4)")
}

pub fn intrinsic_c_inv() -> [[Expr; 4]; 4] {
    let c12 = intrinsic_c_inv_12();
    let m = ex("m");
    let z = Expr::zero();
    [
        [z.clone(), c12.clone(), z.clone(), m.clone()],
        [-&c12, z.clone(), -&m, z.clone()],
        [z.clone(), m.clone(), z.clone(), z.clone()],
        [-&m, z.clone(), z.clone(), z],
    ]
}

pub fn kappa() -> Expr {
    ex("m/(4*b^2)")
}

/// Off the surface; substitute before comparing.
pub fn cartesian_d12_inv() -> Expr {
    ex(&format!(
        "((3*a^2 - 7*a*{RHO})*(p_y*x - p_x*y)^2 + 4*(x^2 + y^2)^2*(p_x^2 + p_y^2 + p_z^2))/(4*b^4*m*(x^2 + y^2)^2)"
    ))
}

/// Six pairwise brackets and four equations of motion, on shell.
pub const INTRINSIC_TABLE: [(&str, &str, &str); 10] = [
    ("theta", "phi", "0"),
    ("p_theta", "p_phi", "0"),
    ("theta", "p_theta", "1"),
    ("phi", "p_phi", "1"),
    ("theta", "p_phi", "0"),
    ("phi", "p_theta", "0"),
    ("theta", "H", "p_theta/(m*b^2)"),
    ("phi", "H", "p_phi/(m*(a + b*sin(theta))^2)"),
    ("p_theta", "H", "b*cos(theta)*p_phi^2/(m*(a + b*sin(theta))^3)"),
    ("p_phi", "H", "0"),
];

pub const INTRINSIC_H: &str = "(p_theta^2/b^2 + p_phi^2/(a + b*sin(theta))^2)/(2*m)";
pub const CARTESIAN_H: &str = "(p_x^2 + p_y^2 + p_z^2)/(2*m)";

pub fn f_closed(i: usize) -> Expr {
    let mut s = AXES[i].to_string();
    if i < 2 {
        s = format!("{s} - a*{}/{RHO}", AXES[i]);
    }
    ex(&s)
}

/// `y d_1j - x d_2j`
fn rot(j: usize) -> Expr {
    match j {
        0 => ex("y"),
        1 => ex("-x"),
        _ => Expr::zero(),
    }
}

/// The five Cartesian families `{x,x}`, `{x,p}`, `{p,p}`, `{x,H}`, `{p,H}`
/// as `(a, b, value)`, off the surface.
pub fn cartesian_table() -> Vec<(String, String, Expr)> {
    let b2 = ex("b^2");
    let lz = ex("x*p_y - y*p_x");
    let rho3 = ex(&format!("{RHO}^3"));
    let psq = ex("p_x^2 + p_y^2 + p_z^2");
    let p = |i: usize| ex(&format!("p_{}", AXES[i]));
    let shifted = |i: usize| p(i) + ex("a") * &lz * rot(i) / &rho3;
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { Expr::one() } else { Expr::zero() };
            let xp = delta - f_closed(i) * f_closed(j) / &b2;
            out.push((AXES[i].to_string(), format!("p_{}", AXES[j]), xp));
            if i != j {
                out.push((AXES[i].to_string(), AXES[j].to_string(), Expr::zero()));
                let pp = -(f_closed(i) * shifted(j) - f_closed(j) * shifted(i)) / &b2;
                out.push((format!("p_{}", AXES[i]), format!("p_{}", AXES[j]), pp));
            }
        }
        out.push((AXES[i].to_string(), "H".to_string(), p(i) / ex("m")));
        let ph = -(f_closed(i) * (&psq - ex("a") * &lz * &lz / &rho3)) / (ex("m") * &b2);
        out.push((format!("p_{}", AXES[i]), "H".to_string(), ph));
    }
    out
}

pub fn mean_curvature() -> Expr {
    ex("-(a + 2*b*sin(theta))/(2*b*(a + b*sin(theta)))")
}

pub fn gauss_curvature() -> Expr {
    ex("sin(theta)/(b*(a + b*sin(theta)))")
}

/// `-(hbar^2/2m) [d_t^2/b^2 + cos(t) d_t/(b w) + d_p^2/w^2 + alpha M^2 - beta K]`.
pub fn hamiltonian(alpha: &Expr, beta: &Expr) -> DiffOp {
    let w = "(a + b*sin(theta))";
    let m = mean_curvature();
    let pot = alpha * &m * &m - beta * gauss_curvature();
    let s = ex("-hbar^2/(2*m)");
    DiffOp::term(2, 0, &s / ex("b^2"))
        + DiffOp::term(1, 0, &s * ex(&format!("cos(theta)/(b*{w})")))
        + DiffOp::term(0, 2, &s / ex(&format!("{w}^2")))
        + DiffOp::mul(&s * pot)
}

pub fn p_theta() -> DiffOp {
    DiffOp::term(1, 0, ex("-I*hbar")) + DiffOp::mul(ex("-I*hbar*b*cos(theta)/(2*(a + b*sin(theta)))"))
}

pub fn p_phi() -> DiffOp {
    DiffOp::term(0, 1, ex("-I*hbar"))
}

pub fn embedding() -> [Expr; 3] {
    [ex("(a + b*sin(theta))*cos(phi)"), ex("(a + b*sin(theta))*sin(phi)"), ex("b*cos(theta)")]
}

/// `f_i` on the chart: `b` times the outward normal.
pub fn f_chart(i: usize) -> Expr {
    [ex("b*sin(theta)*cos(phi)"), ex("b*sin(theta)*sin(phi)"), ex("b*cos(theta)")][i].clone()
}

/// The three components of the geometric momentum on the torus.
pub fn geometric_momenta() -> [DiffOp; 3] {
    let c = "(a + 2*b*sin(theta))/(2*b*(a + b*sin(theta)))";
    let mih = ex("-I*hbar");
    let px = DiffOp::term(1, 0, ex("cos(theta)*cos(phi)/b")) - DiffOp::term(0, 1, ex("sin(phi)/(a + b*sin(theta))"))
        - DiffOp::mul(ex(&format!("{c}*sin(theta)*cos(phi)")));
    let py = DiffOp::term(1, 0, ex("cos(theta)*sin(phi)/b"))
        + DiffOp::term(0, 1, ex("cos(phi)/(a + b*sin(theta))"))
        - DiffOp::mul(ex(&format!("{c}*sin(theta)*sin(phi)")));
    let pz = DiffOp::term(1, 0, ex("sin(theta)/b")) + DiffOp::mul(ex(&format!("{c}*cos(theta)")));
    [px.scale(&mih), py.scale(&mih), pz.scale(&ex("I*hbar"))]
}

/// The anomalous term in `[p_theta, H]` for the general family.
pub fn intrinsic_anomaly(alpha: &Expr, beta: &Expr) -> Expr {
    let poly = ex("a^2") * (alpha - ex("2") * beta + Expr::one()) + ex("2*a*b*sin(theta)") * (alpha - beta) - ex("b^2");
    ex("I*hbar*hbar^2*cos(theta)") * poly / ex("4*b*m*(a + b*sin(theta))^3")
}

pub fn intrinsic_alpha() -> Expr {
    ex("(a^2 - b^2)/a^2")
}

pub fn intrinsic_potential() -> Expr {
    ex("-hbar^2/(2*m)*(a^2 - b^2)/(4*b^2*(a + b*sin(theta))^2)")
}

/// Solved ordering weights in terms of the free `alpha4`, `alpha5`.
pub fn ordering_solution() -> [(&'static str, Expr); 5] {
    [
        ("alpha", ex("1")),
        ("beta", ex("1")),
        ("alpha1", ex("11/9 - alpha4 - alpha5")),
        ("alpha2", ex("-1/9")),
        ("alpha3", ex("-1/9")),
    ]
}
