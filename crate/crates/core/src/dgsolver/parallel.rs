use crate::error::Result;

/// Number of worker threads to use by default.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Run `f(first_item, chunk)` over contiguous pieces of `data`, each piece a
/// multiple of `item` entries. Pieces are processed on scoped threads when
/// `threads > 1`; the first error in storage order is returned.
pub fn for_each_piece<T, F>(data: &mut [T], item: usize, threads: usize, f: F) -> Result<()>
where
    T: Send,
    F: Fn(usize, &mut [T]) -> Result<()> + Sync,
{
    let items = data.len() / item.max(1);
    let threads = threads.max(1).min(items.max(1));
    if threads == 1 {
        return f(0, data);
    }
    let per = items.div_ceil(threads);
    let f = &f;
    let results: Vec<Result<()>> = std::thread::scope(|s| {
        let handles: Vec<_> = data
            .chunks_mut(per * item)
            .enumerate()
            .map(|(i, chunk)| s.spawn(move || f(i * per, chunk)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker thread panicked")).collect()
    });
    results.into_iter().collect()
}
