//! Combination columns: row-wise functions of parent columns.

use crate::error::{Error, Result};
use crate::generator::dataset::{ColumnMeta, ColumnOrigin, Dataset};
use crate::generator::spec::{CombinationKind, CombinationSpec, MISSING};

/// Appends the combination column described by `spec`.
///
/// Missing parent cells propagate missing to the child. And/Or/Xor are
/// bitwise over the integer codes; the square kinds run in 128-bit
/// intermediates and fail on i64 overflow, naming the row.
pub fn apply_combination(dataset: &mut Dataset, spec: &CombinationSpec) -> Result<()> {
    spec.validate(dataset.n_columns(), &format!("combination {}", spec.new_name))?;
    let parents: Vec<&[i64]> = spec.parents.iter().map(|&p| dataset.column(p)).collect();
    let mut child = Vec::with_capacity(dataset.n_rows);
    let mut slot = vec![0i64; parents.len()];
    for row in 0..dataset.n_rows {
        let mut missing = false;
        for (s, col) in slot.iter_mut().zip(&parents) {
            *s = col[row];
            missing |= *s == MISSING;
        }
        if missing {
            child.push(MISSING);
            continue;
        }
        child.push(combine_row(&spec.kind, &slot, &spec.new_name, row)?);
    }
    let cardinality = child_cardinality(&spec.kind, dataset, &spec.parents, &child);
    let parent_names = spec
        .parents
        .iter()
        .map(|&p| dataset.column_name(p).to_owned())
        .collect();
    dataset.columns.push(child);
    dataset.meta.push(ColumnMeta {
        name: spec.new_name.clone(),
        cardinality,
        origin: ColumnOrigin::Combination {
            kind: spec.kind.label().to_owned(),
            parents: parent_names,
        },
        noise: vec![],
    });
    Ok(())
}

fn combine_row(kind: &CombinationKind, values: &[i64], name: &str, row: usize) -> Result<i64> {
    Ok(match kind {
        CombinationKind::And => values.iter().fold(!0i64, |acc, &v| acc & v),
        CombinationKind::Or => values.iter().fold(0i64, |acc, &v| acc | v),
        CombinationKind::Xor => values.iter().fold(0i64, |acc, &v| acc ^ v),
        CombinationKind::SumOfSquares => {
            let sum: i128 = values.iter().map(|&v| (v as i128) * (v as i128)).sum();
            check_range(sum, name, row)?
        }
        CombinationKind::SquareOfSums => {
            let sum: i128 = values.iter().map(|&v| v as i128).sum();
            check_range(sum * sum, name, row)?
        }
        CombinationKind::Custom(f) => {
            let v = f(values);
            if v < 0 {
                return Err(Error::generation(format!(
                    "combination {name}: custom function returned negative value {v} at row {row}"
                )));
            }
            v
        }
    })
}

fn check_range(v: i128, name: &str, row: usize) -> Result<i64> {
    i64::try_from(v).map_err(|_| {
        Error::generation(format!(
            "combination {name}: result {v} exceeds the signed 64-bit range at row {row}"
        ))
    })
}

/// Domain bound recorded for the child column.
///
/// Bitwise kinds get the tight power-of-two bound implied by the widest
/// parent; for the arithmetic and custom kinds the bound is data-dependent,
/// so it is taken from the realized column.
fn child_cardinality(
    kind: &CombinationKind,
    dataset: &Dataset,
    parents: &[usize],
    child: &[i64],
) -> u64 {
    match kind {
        CombinationKind::And | CombinationKind::Or | CombinationKind::Xor => {
            let max_card = parents
                .iter()
                .map(|&p| dataset.meta[p].cardinality)
                .max()
                .unwrap_or(1);
            let bits = 64 - (max_card - 1).leading_zeros();
            1u64 << bits
        }
        _ => child
            .iter()
            .filter(|&&v| v != MISSING)
            .max()
            .map_or(1, |&m| m as u64 + 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::dataset::LabelColumn;
    use crate::generator::spec::Distribution;
    use std::sync::Arc;

    fn dataset_with(columns: Vec<Vec<i64>>, cardinalities: Vec<u64>) -> Dataset {
        let n_rows = columns[0].len();
        let meta = cardinalities
            .iter()
            .enumerate()
            .map(|(i, &c)| ColumnMeta {
                name: format!("f{i}"),
                cardinality: c,
                origin: ColumnOrigin::Feature {
                    distribution: Distribution::Uniform,
                },
                noise: vec![],
            })
            .collect();
        Dataset {
            n_rows,
            columns,
            meta,
            labels: Vec::<LabelColumn>::new(),
            seed: 0,
        }
    }

    fn spec(kind: CombinationKind, parents: Vec<usize>) -> CombinationSpec {
        CombinationSpec {
            kind,
            parents,
            new_name: "child".into(),
        }
    }

    #[test]
    fn xor_is_bitwise() {
        let mut d = dataset_with(vec![vec![5], vec![3]], vec![8, 8]);
        apply_combination(&mut d, &spec(CombinationKind::Xor, vec![0, 1])).unwrap();
        assert_eq!(d.column(2), &[6]); // 0b101 ^ 0b011
    }

    #[test]
    fn square_kinds_match_arithmetic_identities() {
        let mut d = dataset_with(vec![vec![3], vec![4]], vec![8, 8]);
        apply_combination(&mut d, &spec(CombinationKind::SumOfSquares, vec![0, 1])).unwrap();
        apply_combination(&mut d, &spec2("sq", CombinationKind::SquareOfSums, vec![0, 1])).unwrap();
        assert_eq!(d.column(2), &[25]);
        assert_eq!(d.column(3), &[49]);
    }

    fn spec2(name: &str, kind: CombinationKind, parents: Vec<usize>) -> CombinationSpec {
        CombinationSpec {
            kind,
            parents,
            new_name: name.into(),
        }
    }

    #[test]
    fn missing_parents_propagate() {
        let mut d = dataset_with(vec![vec![1, MISSING], vec![1, 1]], vec![2, 2]);
        apply_combination(&mut d, &spec(CombinationKind::And, vec![0, 1])).unwrap();
        assert_eq!(d.column(2), &[1, MISSING]);
    }

    #[test]
    fn overflow_names_the_row() {
        let big = (1i64 << 31) as i64;
        let mut d = dataset_with(vec![vec![0, big], vec![0, big]], vec![1 << 32, 1 << 32]);
        let err = apply_combination(&mut d, &spec(CombinationKind::SquareOfSums, vec![0, 1]))
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 1"), "message was {msg}");
    }

    #[test]
    fn custom_function_applies_row_wise() {
        let mut d = dataset_with(vec![vec![2, 5], vec![3, 7]], vec![8, 8]);
        let f = CombinationKind::Custom(Arc::new(|row: &[i64]| row.iter().sum::<i64>()));
        apply_combination(&mut d, &spec(f, vec![0, 1])).unwrap();
        assert_eq!(d.column(2), &[5, 12]);
    }

    // Exhaustive oracle: the child distribution over two uniform c=8
    // parents must match the 8x8 convolution of the parent pmfs.
    #[test]
    fn bitwise_child_distribution_matches_exhaustive_convolution() {
        use crate::generator::sample::sample_feature;
        use crate::generator::spec::FeatureSpec;

        let n = 100_000usize;
        let a = sample_feature(&FeatureSpec::new("a", 8, Distribution::Uniform), n, 1).unwrap();
        let b = sample_feature(&FeatureSpec::new("b", 8, Distribution::Uniform), n, 2).unwrap();
        let mut d = dataset_with(vec![a, b], vec![8, 8]);

        for (kind, op) in [
            (CombinationKind::And, (|x, y| x & y) as fn(i64, i64) -> i64),
            (CombinationKind::Or, |x, y| x | y),
            (CombinationKind::Xor, |x, y| x ^ y),
        ] {
            let name = format!("c_{}", kind.label());
            apply_combination(&mut d, &spec2(&name, kind, vec![0, 1])).unwrap();
            let child = d.column(d.n_columns() - 1);

            // Expected pmf from enumerating all 64 parent pairs.
            let mut expected = [0f64; 8];
            for x in 0..8i64 {
                for y in 0..8i64 {
                    expected[op(x, y) as usize] += 1.0 / 64.0;
                }
            }
            let mut observed = [0f64; 8];
            for &v in child {
                observed[v as usize] += 1.0 / n as f64;
            }
            for k in 0..8 {
                assert!(
                    (observed[k] - expected[k]).abs() < 0.01,
                    "{name} code {k}: observed {} expected {}",
                    observed[k],
                    expected[k]
                );
            }
        }
    }
}
