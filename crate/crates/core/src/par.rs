//! Data-parallel helpers. With the `parallel` feature (default) these fan
//! out through rayon; without it they run sequentially. Either way the
//! output is bit-identical: the maps are pure and order is preserved.

use crate::linalg::Rational;

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// First `Some` value in index order, searched in parallel when enabled.
#[cfg(feature = "parallel")]
pub(crate) fn find_first<T, F>(n: usize, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().find_map_first(f)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn find_first<T, F>(n: usize, f: F) -> Option<T>
where
    F: Fn(usize) -> Option<T>,
{
    (0..n).find_map(f)
}

/// Apply `f` to every row of a row-major buffer.
#[cfg(feature = "parallel")]
pub(crate) fn for_each_row<F>(data: &mut [Rational], cols: usize, f: F)
where
    F: Fn(usize, &mut [Rational]) + Sync + Send,
{
    use rayon::prelude::*;
    data.par_chunks_mut(cols)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_row<F>(data: &mut [Rational], cols: usize, f: F)
where
    F: Fn(usize, &mut [Rational]),
{
    data.chunks_mut(cols).enumerate().for_each(|(i, row)| f(i, row));
}
