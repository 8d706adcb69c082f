//! Word-vector tables, sentence embeddings and cosine similarity.

use std::collections::{HashMap, HashSet};

use crate::error::{AesError, Result};

/// Static word vectors, as read from a fastText-style `.vec` text file.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorTable {
    dim: usize,
    entries: HashMap<String, Vec<f64>>,
}

impl VectorTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(AesError::invalid("vector dimension must be positive"));
        }
        Ok(VectorTable {
            dim,
            entries: HashMap::new(),
        })
    }

    /// Adds a vector unless the token is already present. Returns whether it
    /// was inserted.
    pub fn insert(&mut self, token: impl Into<String>, vector: Vec<f64>) -> Result<bool> {
        if vector.len() != self.dim {
            return Err(AesError::DimensionMismatch {
                expected: self.dim,
                actual: vector.len(),
            });
        }
        let token = token.into();
        if self.entries.contains_key(&token) {
            return Ok(false);
        }
        self.entries.insert(token, vector);
        Ok(true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.entries.get(token).map(Vec::as_slice)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(token)
    }

    pub fn vocabulary(&self) -> HashSet<String> {
        self.entries.keys().cloned().collect()
    }
}

fn parse_components(fields: &[&str], line: usize) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| AesError::Parse {
                    line,
                    message: format!("non-numeric vector component {f:?}"),
                })
        })
        .collect()
}

/// Reads a word-vector file: a `<count> <dim>` header, then one
/// `token v1 ... v_dim` line per entry. At most `max_tokens` distinct tokens
/// are kept; a repeated token keeps its first vector.
pub fn load_vectors(bytes: &[u8], max_tokens: Option<usize>) -> Result<VectorTable> {
    let text = std::str::from_utf8(bytes)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(AesError::Parse {
        line: 1,
        message: "missing `<count> <dim>` header".into(),
    })?;
    let header: Vec<&str> = header.split_whitespace().collect();
    let parse_header = |s: &str| {
        s.parse::<usize>().map_err(|_| AesError::Parse {
            line: 1,
            message: format!("header field {s:?} is not a non-negative integer"),
        })
    };
    let [count, dim] = header[..] else {
        return Err(AesError::Parse {
            line: 1,
            message: "header must be `<count> <dim>`".into(),
        });
    };
    let count = parse_header(count)?;
    let dim = parse_header(dim)?;
    if dim == 0 {
        return Err(AesError::Parse {
            line: 1,
            message: "dimension must be positive".into(),
        });
    }
    let limit = max_tokens.map_or(count, |m| m.min(count));
    let mut table = VectorTable::new(dim)?;
    for (idx, raw) in lines {
        if table.len() >= limit {
            break;
        }
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(' ').filter(|f| !f.is_empty()).collect();
        if fields.len() != dim + 1 {
            return Err(AesError::Parse {
                line: line_no,
                message: format!(
                    "expected {dim} components, found {}",
                    fields.len().saturating_sub(1)
                ),
            });
        }
        let vector = parse_components(&fields[1..], line_no)?;
        table.insert(fields[0], vector)?;
    }
    Ok(table)
}

/// Maps the sentences of one essay to vectors of a fixed dimension.
pub trait SentenceEmbedder {
    fn dim(&self) -> usize;

    /// `index` is the sentence position within the essay.
    fn embed(&self, index: usize, tokens: &[String]) -> Vec<f64>;
}

impl SentenceEmbedder for VectorTable {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, _index: usize, tokens: &[String]) -> Vec<f64> {
        sentence_embedding(tokens, self)
    }
}

/// Mean of the in-vocabulary token vectors, or the zero vector when no
/// token is known.
pub fn sentence_embedding(tokens: &[String], table: &VectorTable) -> Vec<f64> {
    let mut sum = vec![0.0; table.dim];
    let mut hits = 0usize;
    for v in tokens.iter().filter_map(|t| table.get(t)) {
        for (acc, x) in sum.iter_mut().zip(v) {
            *acc += x;
        }
        hits += 1;
    }
    if hits > 0 {
        let n = hits as f64;
        sum.iter_mut().for_each(|x| *x /= n);
    }
    sum
}

/// Externally computed sentence vectors for a single essay, read from
/// `sentence_index<TAB>v1 ... v_dim` lines. Sentences without a line embed
/// to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecomputedSentences {
    dim: usize,
    vectors: HashMap<usize, Vec<f64>>,
}

impl PrecomputedSentences {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes)?;
        let mut dim = None;
        let mut vectors = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (index, rest) = line.split_once('\t').ok_or_else(|| AesError::Parse {
                line: line_no,
                message: "expected `sentence_index<TAB>vector`".into(),
            })?;
            let index: usize = index.trim().parse().map_err(|_| AesError::Parse {
                line: line_no,
                message: format!("bad sentence index {index:?}"),
            })?;
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let vector = parse_components(&fields, line_no)?;
            match dim {
                None if vector.is_empty() => {
                    return Err(AesError::Parse {
                        line: line_no,
                        message: "empty vector".into(),
                    })
                }
                None => dim = Some(vector.len()),
                Some(d) if d != vector.len() => {
                    return Err(AesError::Parse {
                        line: line_no,
                        message: format!("expected {d} components, found {}", vector.len()),
                    })
                }
                Some(_) => {}
            }
            if vectors.insert(index, vector).is_some() {
                return Err(AesError::Parse {
                    line: line_no,
                    message: format!("duplicate sentence index {index}"),
                });
            }
        }
        let dim = dim.ok_or(AesError::Parse {
            line: 1,
            message: "no sentence vectors".into(),
        })?;
        Ok(PrecomputedSentences { dim, vectors })
    }
}

impl SentenceEmbedder for PrecomputedSentences {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, index: usize, _tokens: &[String]) -> Vec<f64> {
        self.vectors
            .get(&index)
            .cloned()
            .unwrap_or_else(|| vec![0.0; self.dim])
    }
}

/// Cosine similarity; 0.0 when either vector has zero norm.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(AesError::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TWO: &str = "2 3\nघर 1 0 0\nस्कूल 0 2 0\n";

    fn toks(ts: &[&str]) -> Vec<String> {
        ts.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn loads_table() {
        let t = load_vectors(TWO.as_bytes(), None).unwrap();
        assert_eq!((t.len(), t.dim()), (2, 3));
        assert_eq!(t.get("स्कूल"), Some(&[0.0, 2.0, 0.0][..]));
    }

    #[test]
    fn arity_error_reports_line() {
        let bad = "2 3\nघर 1 0 0\nस्कूल 0 2\n";
        match load_vectors(bad.as_bytes(), None) {
            Err(AesError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let nan = "1 2\nघर 1 abc\n";
        assert!(matches!(
            load_vectors(nan.as_bytes(), None),
            Err(AesError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn truncation_and_duplicates() {
        assert_eq!(load_vectors(TWO.as_bytes(), Some(1)).unwrap().len(), 1);
        let dup = "3 1\na 1\na 2\nb 3 \n";
        let t = load_vectors(dup.as_bytes(), None).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("a"), Some(&[1.0][..]));
    }

    #[test]
    fn embedding_means() {
        let t = load_vectors(TWO.as_bytes(), None).unwrap();
        assert_eq!(sentence_embedding(&toks(&["घर"]), &t), vec![1.0, 0.0, 0.0]);
        assert_eq!(
            sentence_embedding(&toks(&["घर", "स्कूल", "नया"]), &t),
            vec![0.5, 1.0, 0.0]
        );
        assert_eq!(sentence_embedding(&toks(&["x", "y"]), &t), vec![0.0; 3]);
    }

    #[test]
    fn cosine_cases() {
        assert!((cosine(&[0.3, 0.4], &[0.3, 0.4]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(cosine(&[1.0, 0.0], &[-1.0, 0.0]).unwrap(), -1.0);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(cosine(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn precomputed_sentences() {
        let p = PrecomputedSentences::parse(b"0\t1 0\n2\t0 1\n").unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.embed(2, &[]), vec![0.0, 1.0]);
        assert_eq!(p.embed(1, &[]), vec![0.0, 0.0]);
        assert!(PrecomputedSentences::parse(b"0\t1 0\n1\t1\n").is_err());
    }

    fn vec3() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, 3)
    }

    proptest! {
        #[test]
        fn cosine_symmetric_and_scale_invariant(u in vec3(), v in vec3(), alpha in 0.01f64..100.0) {
            let c = cosine(&u, &v).unwrap();
            prop_assert!((c - cosine(&v, &u).unwrap()).abs() < 1e-12);
            let scaled: Vec<f64> = u.iter().map(|x| x * alpha).collect();
            prop_assert!((c - cosine(&scaled, &v).unwrap()).abs() < 1e-9);
            prop_assert!((-1.0..=1.0).contains(&c));
        }

        #[test]
        fn embedding_permutation_invariant(mut order in Just(vec!["घर", "स्कूल", "x", "घर"]).prop_shuffle()) {
            let t = load_vectors(TWO.as_bytes(), None).unwrap();
            let base = sentence_embedding(&toks(&["घर", "स्कूल", "x", "घर"]), &t);
            order.reverse();
            let other = sentence_embedding(&toks(&order), &t);
            for (a, b) in base.iter().zip(&other) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
