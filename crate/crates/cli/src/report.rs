use std::fmt::Write;

use ctensor::estimation::FitReport;
use ctensor::uniqueness::UniquenessReport;

fn list(v: &[usize]) -> String {
    if v.is_empty() {
        "-".into()
    } else {
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    }
}

fn row(out: &mut String, indent: usize, r: &UniquenessReport) {
    let name = format!("{}{}", "  ".repeat(indent), r.condition);
    let margin = r.margin.map_or("-".into(), |m| m.to_string());
    let _ = writeln!(out, "{:<44} {:<14} {:>6}  {:<12} {}", name, r.verdict.to_string(), margin, list(&r.k_ranks), list(&r.ranks));
    for sub in &r.related {
        row(out, indent + 1, sub);
    }
}

/// Summary line, then one table row per condition and sub-condition.
pub fn uniqueness(reports: &[UniquenessReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let margin = r.margin.map_or(String::new(), |m| format!(", margin {m}"));
        let case = r.case.map_or(String::new(), |c| format!(", case {c}"));
        let _ = writeln!(out, "{}: {}{}{}", r.condition, r.verdict, margin, case);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<44} {:<14} {:>6}  {:<12} ranks", "condition", "verdict", "margin", "k-ranks");
    for r in reports {
        row(&mut out, 0, r);
    }
    for r in reports {
        for note in &r.notes {
            let _ = writeln!(out, "note ({}): {}", r.condition, note);
        }
        if let Some(w) = &r.witness {
            let _ = writeln!(out, "witness ({}): {:?}", r.condition, w);
        }
        if r.extrapolated {
            let _ = writeln!(out, "note ({}): extrapolated beyond the proven statement", r.condition);
        }
    }
    out
}

pub fn fit(r: &FitReport) -> String {
    let stop = serde_json::to_value(r.stop_reason).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    format!(
        "start        {}\niterations   {}\nconverged    {}\nstop_reason  {}\nrel_error    {:.6e}\nregularized  {}\n",
        r.start + 1,
        r.iterations,
        r.converged,
        stop,
        r.final_error(),
        r.regularized
    )
}
