//! Edit distance with adjacent transpositions (optimal string alignment).

/// Optimal string alignment distance: insertions, deletions, substitutions
/// and swaps of two adjacent characters each cost 1.
pub fn osa_distance(a: &[char], b: &[char]) -> usize {
    osa_bounded(a, b, usize::MAX).unwrap_or(usize::MAX)
}

/// Like [`osa_distance`] but gives up with `None` as soon as the distance is
/// known to exceed `max`.
pub fn osa_bounded(a: &[char], b: &[char], max: usize) -> Option<usize> {
    let (n, m) = (a.len(), b.len());
    if n.abs_diff(m) > max {
        return None;
    }
    if n == 0 || m == 0 {
        return Some(n.max(m));
    }
    let mut two_back: Vec<usize> = vec![0; m + 1];
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur: Vec<usize> = vec![0; m + 1];
    let mut prev_min = 0;
    for i in 1..=n {
        cur[0] = i;
        let mut row_min = i;
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut d = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                d = d.min(two_back[j - 2] + 1);
            }
            cur[j] = d;
            row_min = row_min.min(d);
        }
        // Every later row is bounded below by the minimum of the two rows
        // before it, so two consecutive rows above `max` end the search.
        if row_min > max && prev_min > max {
            return None;
        }
        prev_min = row_min;
        std::mem::swap(&mut two_back, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    let d = prev[m];
    (d <= max).then_some(d)
}

/// Tokens joined by single spaces, as characters.
pub fn joined_chars(tokens: &[String]) -> Vec<char> {
    let mut out = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.extend(t.chars());
    }
    out
}

/// `1 - distance / max(len)` over the space-joined character strings.
pub fn char_similarity(a: &[char], b: &[char]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - osa_distance(a, b) as f64 / longest as f64
}

/// Similarity between two token sequences, in `[0, 1]`; 1.0 iff equal.
pub fn similarity(candidate: &[String], phrase: &[String]) -> f64 {
    char_similarity(&joined_chars(candidate), &joined_chars(phrase))
}
