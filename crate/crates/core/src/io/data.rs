//! Numeric dataset carriers and their text formats.
//!
//! * `*.grid`: header line `H W`, then `H` lines of `W` space-separated
//!   integers in [0, 255].
//! * `*.probs.csv`: header `instance_id,label,p_0,...,p_{K-1}`.
//! * `*.acts.csv`: header `sample_id,a_0,...,a_{N-1}`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("value out of range at line {line}: {message}")]
    ValueOutOfRange { line: usize, message: String },
    #[error("probabilities of row {0} do not sum to 1")]
    NotNormalized(String),
    #[error("csv: {0}")]
    Csv(String),
}

/// Row-major integer grid: a binary mask or an 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledGrid {
    height: usize,
    width: usize,
    values: Vec<u8>,
}

impl LabeledGrid {
    pub fn new(height: usize, width: usize, values: Vec<u8>) -> Result<Self, DataError> {
        if height == 0 || width == 0 {
            return Err(DataError::DimensionMismatch(format!(
                "grid dimensions must be positive, got {height}x{width}"
            )));
        }
        if values.len() != height * width {
            return Err(DataError::DimensionMismatch(format!(
                "{height}x{width} grid needs {} values, got {}",
                height * width,
                values.len()
            )));
        }
        Ok(LabeledGrid { height, width, values })
    }

    pub fn filled(height: usize, width: usize, value: u8) -> Result<Self, DataError> {
        Self::new(height, width, vec![value; height * width])
    }

    /// Builds a grid from nested rows; convenient in tests.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, DataError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(height * width);
        for (i, r) in rows.iter().enumerate() {
            if r.as_ref().len() != width {
                return Err(DataError::DimensionMismatch(format!("row {i} has a different width")));
            }
            values.extend_from_slice(r.as_ref());
        }
        Self::new(height, width, values)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.values[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.values[row * self.width + col] = value;
    }

    pub fn same_shape(&self, other: &LabeledGrid) -> bool {
        self.height == other.height && self.width == other.width
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v <= 1)
    }

    /// Number of non-zero cells.
    pub fn count_nonzero(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }
}

pub fn read_grid(text: &str) -> Result<LabeledGrid, DataError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(DataError::Syntax {
        line: 1,
        message: "missing `H W` header".into(),
    })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let parse_dim = |s: &str| {
        s.parse::<usize>().map_err(|_| DataError::Syntax {
            line: hline + 1,
            message: format!("invalid dimension `{s}`"),
        })
    };
    if dims.len() != 2 {
        return Err(DataError::Syntax {
            line: hline + 1,
            message: "header must be `H W`".into(),
        });
    }
    let (height, width) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
    if height == 0 || width == 0 {
        return Err(DataError::DimensionMismatch(format!(
            "grid dimensions must be positive, got {height}x{width}"
        )));
    }
    let mut values = Vec::with_capacity(height * width);
    let mut nrows = 0;
    for (i, line) in lines {
        nrows += 1;
        if nrows > height {
            return Err(DataError::DimensionMismatch(format!(
                "expected {height} rows, found more at line {}",
                i + 1
            )));
        }
        let mut count = 0;
        for tok in line.split_whitespace() {
            count += 1;
            let v: i64 = tok.parse().map_err(|_| DataError::Syntax {
                line: i + 1,
                message: format!("invalid integer `{tok}`"),
            })?;
            if !(0..=255).contains(&v) {
                return Err(DataError::ValueOutOfRange {
                    line: i + 1,
                    message: format!("{v} outside [0, 255]"),
                });
            }
            values.push(v as u8);
        }
        if count != width {
            return Err(DataError::DimensionMismatch(format!(
                "line {} has {count} values, expected {width}",
                i + 1
            )));
        }
    }
    if nrows != height {
        return Err(DataError::DimensionMismatch(format!("expected {height} rows, found {nrows}")));
    }
    LabeledGrid::new(height, width, values)
}

pub fn write_grid(grid: &LabeledGrid) -> String {
    let mut out = format!("{} {}\n", grid.height, grid.width);
    for row in grid.values.chunks(grid.width) {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityRow {
    pub instance_id: String,
    pub observed_label: usize,
    pub probabilities: Vec<f64>,
}

/// Per-instance predicted class probabilities with the observed label.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    num_classes: usize,
    rows: Vec<ProbabilityRow>,
}

pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

impl ProbabilityTable {
    pub fn new(num_classes: usize, rows: Vec<ProbabilityRow>) -> Result<Self, DataError> {
        if num_classes < 2 {
            return Err(DataError::DimensionMismatch(format!(
                "need at least 2 classes, got {num_classes}"
            )));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.probabilities.len() != num_classes {
                return Err(DataError::DimensionMismatch(format!(
                    "row {} has {} probabilities, expected {num_classes}",
                    r.instance_id,
                    r.probabilities.len()
                )));
            }
            if r.observed_label >= num_classes {
                return Err(DataError::ValueOutOfRange {
                    line: i + 2,
                    message: format!("label {} outside [0, {num_classes})", r.observed_label),
                });
            }
            if r.probabilities.iter().any(|p| !p.is_finite() || !(0.0..=1.0).contains(p)) {
                return Err(DataError::ValueOutOfRange {
                    line: i + 2,
                    message: format!("probability of {} outside [0, 1]", r.instance_id),
                });
            }
            let sum: f64 = r.probabilities.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(DataError::NotNormalized(r.instance_id.clone()));
            }
        }
        Ok(ProbabilityTable { num_classes, rows })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn rows(&self) -> &[ProbabilityRow] {
        &self.rows
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivationRow {
    pub sample_id: String,
    pub activations: Vec<f64>,
}

/// Per-sample neuron activations captured at one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationTable {
    num_neurons: usize,
    rows: Vec<ActivationRow>,
}

impl ActivationTable {
    pub fn new(num_neurons: usize, rows: Vec<ActivationRow>) -> Result<Self, DataError> {
        if num_neurons == 0 {
            return Err(DataError::DimensionMismatch("need at least one neuron".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.activations.len() != num_neurons {
                return Err(DataError::DimensionMismatch(format!(
                    "sample {} has {} activations, expected {num_neurons}",
                    r.sample_id,
                    r.activations.len()
                )));
            }
            if r.activations.iter().any(|a| !a.is_finite()) {
                return Err(DataError::ValueOutOfRange {
                    line: i + 2,
                    message: format!("non-finite activation in sample {}", r.sample_id),
                });
            }
        }
        Ok(ActivationTable { num_neurons, rows })
    }

    pub fn num_neurons(&self) -> usize {
        self.num_neurons
    }

    pub fn rows(&self) -> &[ActivationRow] {
        &self.rows
    }
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes())
}

fn csv_err(e: csv::Error) -> DataError {
    DataError::Csv(e.to_string())
}

fn check_header(headers: &csv::StringRecord, first: &str, second: Option<&str>, prefix: &str) -> Result<usize, DataError> {
    let fixed = 1 + second.is_some() as usize;
    let syntax = |message: String| DataError::Syntax { line: 1, message };
    if headers.get(0) != Some(first) {
        return Err(syntax(format!("first column must be `{first}`")));
    }
    if let Some(second) = second {
        if headers.get(1) != Some(second) {
            return Err(syntax(format!("second column must be `{second}`")));
        }
    }
    let n = headers.len().saturating_sub(fixed);
    for j in 0..n {
        let expected = format!("{prefix}{j}");
        if headers.get(fixed + j) != Some(expected.as_str()) {
            return Err(syntax(format!("column {} must be `{expected}`", fixed + j)));
        }
    }
    Ok(n)
}

fn parse_real(tok: &str, line: usize) -> Result<f64, DataError> {
    let v: f64 = tok.trim().parse().map_err(|_| DataError::Syntax {
        line,
        message: format!("invalid number `{tok}`"),
    })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DataError::ValueOutOfRange {
            line,
            message: format!("non-finite value `{tok}`"),
        })
    }
}

pub fn read_prob_table(text: &str) -> Result<ProbabilityTable, DataError> {
    let mut rdr = csv_reader(text);
    let k = check_header(rdr.headers().map_err(csv_err)?, "instance_id", Some("label"), "p_")?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        let label = rec[1].trim().parse::<usize>().map_err(|_| DataError::ValueOutOfRange {
            line,
            message: format!("invalid label `{}`", &rec[1]),
        })?;
        let probabilities = (2..rec.len())
            .map(|j| parse_real(&rec[j], line))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(ProbabilityRow {
            instance_id: rec[0].to_string(),
            observed_label: label,
            probabilities,
        });
    }
    ProbabilityTable::new(k, rows)
}

pub fn read_activations(text: &str) -> Result<ActivationTable, DataError> {
    let mut rdr = csv_reader(text);
    let n = check_header(rdr.headers().map_err(csv_err)?, "sample_id", None, "a_")?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let activations = (1..rec.len())
            .map(|j| parse_real(&rec[j], i + 2))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(ActivationRow {
            sample_id: rec[0].to_string(),
            activations,
        });
    }
    ActivationTable::new(n, rows)
}

fn csv_string(header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn write_prob_table(t: &ProbabilityTable) -> String {
    let mut header = vec!["instance_id".to_string(), "label".to_string()];
    header.extend((0..t.num_classes).map(|j| format!("p_{j}")));
    csv_string(
        header,
        t.rows.iter().map(|r| {
            let mut rec = vec![r.instance_id.clone(), r.observed_label.to_string()];
            rec.extend(r.probabilities.iter().map(|p| p.to_string()));
            rec
        }),
    )
}

pub fn write_activations(t: &ActivationTable) -> String {
    let mut header = vec!["sample_id".to_string()];
    header.extend((0..t.num_neurons).map(|j| format!("a_{j}")));
    csv_string(
        header,
        t.rows.iter().map(|r| {
            let mut rec = vec![r.sample_id.clone()];
            rec.extend(r.activations.iter().map(|a| a.to_string()));
            rec
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_small_mask() {
        let g = read_grid("2 2\n1 0\n0 1").unwrap();
        assert_eq!((g.height(), g.width()), (2, 2));
        assert_eq!(g.values(), &[1, 0, 0, 1]);
        assert!(g.is_binary());
    }

    #[test]
    fn grid_errors() {
        assert!(matches!(read_grid("2 2\n1 0\n0"), Err(DataError::DimensionMismatch(_))));
        assert!(matches!(read_grid("2 2\n1 0"), Err(DataError::DimensionMismatch(_))));
        assert!(matches!(read_grid("1 2\n1 256"), Err(DataError::ValueOutOfRange { .. })));
        assert!(matches!(read_grid("1 2\n1 -1"), Err(DataError::ValueOutOfRange { .. })));
        assert!(matches!(read_grid("1 2\n1 x"), Err(DataError::Syntax { .. })));
        assert!(matches!(read_grid(""), Err(DataError::Syntax { .. })));
        assert!(matches!(read_grid("0 3\n"), Err(DataError::DimensionMismatch(_))));
    }

    #[test]
    fn unnormalized_probabilities_rejected() {
        let text = "instance_id,label,p_0,p_1\nimg1,0,0.5,0.6\n";
        assert_eq!(read_prob_table(text), Err(DataError::NotNormalized("img1".into())));
    }

    #[test]
    fn reads_probabilities() {
        let text = "instance_id,label,p_0,p_1,p_2\na,2,0.2,0.3,0.5\n\"b,quoted\",0,1,0,0\n";
        let t = read_prob_table(text).unwrap();
        assert_eq!(t.num_classes(), 3);
        assert_eq!(t.rows()[1].instance_id, "b,quoted");
        assert_eq!(read_prob_table(&write_prob_table(&t)).unwrap(), t);
    }

    #[test]
    fn label_out_of_range() {
        let text = "instance_id,label,p_0,p_1\na,2,0.5,0.5\n";
        assert!(matches!(read_prob_table(text), Err(DataError::ValueOutOfRange { .. })));
    }

    #[test]
    fn non_finite_activation_rejected() {
        let text = "sample_id,a_0,a_1\ns1,0.5,NaN\n";
        assert!(matches!(read_activations(text), Err(DataError::ValueOutOfRange { .. })));
        let text = "sample_id,a_0,a_1\ns1,0.5,inf\n";
        assert!(matches!(read_activations(text), Err(DataError::ValueOutOfRange { .. })));
    }

    #[test]
    fn activation_header_checked() {
        let text = "sample_id,a_0,a_2\ns1,0.5,1\n";
        assert!(matches!(read_activations(text), Err(DataError::Syntax { .. })));
        let text = "sample_id,a_0,a_1\ns1,0.5\n";
        assert!(read_activations(text).is_err());
    }

    #[test]
    fn activations_round_trip() {
        let t = ActivationTable::new(
            2,
            vec![ActivationRow {
                sample_id: "s".into(),
                activations: vec![0.1, -3.25e-7],
            }],
        )
        .unwrap();
        assert_eq!(read_activations(&write_activations(&t)).unwrap(), t);
    }

    fn grid_strategy() -> impl Strategy<Value = LabeledGrid> {
        (1usize..10, 1usize..10).prop_flat_map(|(h, w)| {
            proptest::collection::vec(any::<u8>(), h * w).prop_map(move |v| LabeledGrid::new(h, w, v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn grid_round_trip(g in grid_strategy()) {
            prop_assert_eq!(read_grid(&write_grid(&g)).unwrap(), g);
        }
    }
}
