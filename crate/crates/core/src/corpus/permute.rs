use super::{DistinctCorpus, Origin, PairInstance, ParallelCorpus};

/// All ordered pairs of distinct members within each slug, skipping pairs
/// whose members share a rank. Pairs never cross slugs. Output follows slug
/// order, then `(i, j)` member indices lexicographically.
pub fn permute_parallel(corpus: &ParallelCorpus) -> Vec<PairInstance> {
    let mut out = Vec::new();
    for slug in &corpus.slugs {
        let members = &slug.members;
        for (i, a) in members.iter().enumerate() {
            for (j, b) in members.iter().enumerate() {
                if i == j {
                    continue;
                }
                if let Some(pair) =
                    PairInstance::new(a.clone(), b.clone(), Origin::Parallel(slug.slug_id.clone()))
                {
                    out.push(pair);
                }
            }
        }
    }
    out
}

/// All ordered pairs of distinct records whose ranks differ, in `(i, j)`
/// index order.
pub fn permute_distinct(corpus: &DistinctCorpus) -> Vec<PairInstance> {
    let records = &corpus.records;
    let mut out = Vec::new();
    for (i, a) in records.iter().enumerate() {
        for (j, b) in records.iter().enumerate() {
            if i == j {
                continue;
            }
            if let Some(pair) = PairInstance::new(a.clone(), b.clone(), Origin::Distinct) {
                out.push(pair);
            }
        }
    }
    out
}
