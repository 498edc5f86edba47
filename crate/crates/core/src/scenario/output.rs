use serde_json::{json, Value};

/// Plot-ready numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub scenario: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Values printed with 17 significant digits; failed points print `NaN`.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Failed points become `null`.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|&v| if v.is_finite() { json!(v) } else { Value::Null })
                        .collect(),
                )
            })
            .collect();
        let doc = json!({
            "scenario": self.scenario,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_doubles() {
        let t = Table {
            scenario: "x".into(),
            columns: vec!["a".into(), "b".into()],
            rows: vec![vec![0.1 + 0.2, f64::NAN]],
        };
        let csv = t.to_csv();
        let line = csv.lines().nth(1).unwrap();
        let mut cells = line.split(',');
        assert_eq!(cells.next().unwrap().parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(cells.next().unwrap(), "NaN");
        assert!(t.to_json().contains("null"));
    }
}
