/// Rounds to 4 significant figures for table output.
pub fn sig4(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        return format!("{x:.3e}");
    }
    // Rounding can carry into a new digit (9.9996 -> 10.000); recompute.
    let decimals = (3 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let rounded: f64 = s.parse().unwrap_or(x);
    let exp2 = rounded.abs().log10().floor() as i32;
    if exp2 != exp {
        let decimals = (3 - exp2).max(0) as usize;
        return format!("{rounded:.decimals$}");
    }
    s
}

pub fn opt4(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), sig4)
}

/// Left-aligned first column, right-aligned others.
pub fn render_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut s = String::new();
        for (j, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if j == 0 {
                s.push_str(&format!("{c:<w$}"));
            } else {
                s.push_str(&format!("  {c:>w$}"));
            }
        }
        s.trim_end().to_owned() + "\n"
    };
    let mut out = line(header);
    for r in rows {
        out.push_str(&line(r));
    }
    out
}
