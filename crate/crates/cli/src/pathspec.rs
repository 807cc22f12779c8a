//! Path grammar for sweeps: "start:end:step" segments joined by commas, e.g.
//! "0:95:1,95:0:1" for an up-down loop. Steps are positive; direction comes
//! from the endpoints. Segment boundaries shared with the previous point are
//! emitted once.

pub fn parse_path(spec: &str) -> Result<Vec<f64>, String> {
    let mut points: Vec<f64> = Vec::new();
    for segment in spec.split(',') {
        let parts: Vec<&str> = segment.split(':').collect();
        if parts.len() != 3 {
            return Err(format!(
                "path segment {segment:?} is not of the form start:end:step"
            ));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("path segment {segment:?}: {p:?} is not a number"))
            })
            .collect::<Result<_, _>>()?;
        let (start, end, step) = (nums[0], nums[1], nums[2]);
        if !start.is_finite() || !end.is_finite() || !step.is_finite() {
            return Err(format!("path segment {segment:?} contains non-finite values"));
        }
        if step <= 0.0 {
            return Err(format!("path segment {segment:?}: step must be positive"));
        }
        let direction = if end >= start { 1.0 } else { -1.0 };
        let count = ((end - start) / (direction * step) + 1e-9).floor() as usize;
        for i in 0..=count {
            let v = start + direction * step * i as f64;
            if points.last() != Some(&v) {
                points.push(v);
            }
        }
        if points.last() != Some(&end) {
            points.push(end);
        }
    }
    if points.is_empty() {
        return Err("path is empty".to_string());
    }
    Ok(points)
}
