//! Deterministic work splitting over std threads.
//!
//! Results are reduced in chunk-index order, so output never depends on
//! scheduling.

/// Map `f` over `0..n` in parallel chunks and collect per-index results.
pub fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = available_threads().min(n.max(1));
    if threads <= 1 || n < 2 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(threads);
    let mut out: Vec<Option<T>> = Vec::with_capacity(n);
    out.resize_with(n, || None);
    let fref = &f;
    std::thread::scope(|scope| {
        let mut slices: Vec<&mut [Option<T>]> = Vec::new();
        let mut rest = out.as_mut_slice();
        while !rest.is_empty() {
            let take = chunk.min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            slices.push(head);
            rest = tail;
        }
        for (ci, slice) in slices.into_iter().enumerate() {
            scope.spawn(move || {
                let base = ci * chunk;
                for (off, slot) in slice.iter_mut().enumerate() {
                    *slot = Some(fref(base + off));
                }
            });
        }
    });
    out.into_iter().map(|v| v.expect("worker filled slot")).collect()
}

fn available_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_serial_map() {
        let got = par_map(1000, |i| (i * i) as u64);
        let want: Vec<u64> = (0..1000).map(|i| (i * i) as u64).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn small_inputs() {
        assert_eq!(par_map(0, |i| i), Vec::<usize>::new());
        assert_eq!(par_map(1, |i| i), vec![0]);
    }
}
