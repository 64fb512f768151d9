/// Length of the longest common contiguous run of equal terms.
pub fn longest_common_substring(s1: &[String], s2: &[String]) -> usize {
    let mut best = 0;
    let mut prev = vec![0usize; s2.len() + 1];
    let mut cur = vec![0usize; s2.len() + 1];
    for a in s1 {
        for (j, b) in s2.iter().enumerate() {
            cur[j + 1] = if a == b { prev[j] + 1 } else { 0 };
            best = best.max(cur[j + 1]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

/// Term-level similarity: `|LCS(s1, s2)| / avg(|s1|, |s2|)`, where LCS is
/// the longest common substring of terms. Zero when either side is empty.
pub fn similarity(s1: &[String], s2: &[String]) -> f64 {
    if s1.is_empty() || s2.is_empty() {
        return 0.0;
    }
    let avg = (s1.len() + s2.len()) as f64 / 2.0;
    longest_common_substring(s1, s2) as f64 / avg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn worked_values() {
        assert!((similarity(&t("restore backup"), &t("restore from backup")) - 0.4).abs() < 1e-9);
        assert!((similarity(&t("restore back up"), &t("back up to sd card")) - 0.5).abs() < 1e-9);
        assert_eq!(similarity(&t("a b c"), &t("a b c")), 1.0);
        assert_eq!(similarity(&t("a b"), &[]), 0.0);
        assert_eq!(similarity(&t("a b"), &t("c d")), 0.0);
    }

    #[test]
    fn order_matters() {
        assert_eq!(longest_common_substring(&t("a b c"), &t("c b a")), 1);
        assert_eq!(longest_common_substring(&t("x a b y"), &t("a b")), 2);
    }
}
