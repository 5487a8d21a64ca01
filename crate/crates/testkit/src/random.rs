//! Random terms built from data-service primitives on one data object.

use rand::Rng;

/// A random term over `ty` with `inputs` wires and at most `max_nodes`
/// primitive nodes, and the number of output wires. Wire counts stay in
/// `1..=4`.
pub fn data_term<R: Rng>(rng: &mut R, ty: &str, inputs: usize, max_nodes: usize) -> (String, usize) {
    let id = format!("id[{}]", ty);
    let mut w = inputs;
    let mut layers = Vec::new();
    let mut nodes = 0;
    let steps = rng.gen_range(0..=max_nodes + 2);
    for _ in 0..steps {
        if nodes == max_nodes {
            break;
        }
        let (op, arity_in, arity_out, counts) = match rng.gen_range(0..4) {
            0 if w >= 2 => (format!("mu[{}]", ty), 2, 1, true),
            1 if w <= 3 => (format!("delta[{}]", ty), 1, 2, true),
            2 if w >= 2 => (format!("eps[{}]", ty), 1, 0, true),
            3 if w >= 2 => (format!("swap[{},{}]", ty, ty), 2, 2, false),
            _ => continue,
        };
        let at = rng.gen_range(0..=w - arity_in);
        let mut parts: Vec<String> = vec![id.clone(); at];
        parts.push(op);
        parts.extend(vec![id.clone(); w - at - arity_in]);
        layers.push(format!("({})", parts.join(" * ")));
        w = w - arity_in + arity_out;
        nodes += counts as usize;
    }
    if layers.is_empty() {
        layers.push(format!("({})", vec![id; inputs].join(" * ")));
    }
    (layers.join(" ; "), w)
}

/// A random term on one entity `m` with attribute `attr : m -> d`, mixing
/// reads, filters and data primitives. Returns the term and its input types.
pub fn attr_term<R: Rng>(rng: &mut R, m: &str, d: &str, attr: &str, max_nodes: usize) -> (String, Vec<String>) {
    let mut w: Vec<String> = vec![m.to_string()];
    for _ in 0..rng.gen_range(0..=1) {
        w.push(d.to_string());
    }
    let inputs = w.clone();
    let mut layers = Vec::new();
    let mut nodes = 0;
    for _ in 0..max_nodes * 3 {
        if nodes == max_nodes {
            break;
        }
        let at = rng.gen_range(0..w.len());
        let next = w.get(at + 1).map(String::as_str);
        let here = w[at].as_str();
        let (op, ins, outs): (String, usize, Vec<String>) = match rng.gen_range(0..6) {
            0 if here == m && w.len() < 4 => (format!("get[{}]", attr), 1, vec![m.into(), d.into()]),
            1 if here == m && next == Some(d) => (format!("set[{}]", attr), 2, vec![m.into()]),
            2 if here == d && next == Some(d) => (format!("mu[{}]", d), 2, vec![d.into()]),
            3 if here == d && w.len() < 4 => (format!("delta[{}]", d), 1, vec![d.into(), d.into()]),
            4 if here == d => (format!("eps[{}]", d), 1, vec![]),
            5 if next.is_some() => {
                let n = next.unwrap().to_string();
                (format!("swap[{},{}]", here, n), 2, vec![n, here.to_string()])
            }
            _ => continue,
        };
        let mut parts: Vec<String> = w[..at].iter().map(|t| format!("id[{}]", t)).collect();
        parts.push(op);
        parts.extend(w[at + ins..].iter().map(|t| format!("id[{}]", t)));
        layers.push(format!("({})", parts.join(" * ")));
        w.splice(at..at + ins, outs);
        nodes += 1;
    }
    if layers.is_empty() {
        layers.push(format!("({})", inputs.iter().map(|t| format!("id[{}]", t)).collect::<Vec<_>>().join(" * ")));
    }
    (layers.join(" ; "), inputs)
}
