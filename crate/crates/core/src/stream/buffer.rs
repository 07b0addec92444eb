//! Hardware-shaped storage elements for the streaming executor.
//!
//! The streaming stages never touch whole frames: pixels arrive one per
//! step, line buffers retain the trailing rows a window needs, and delay
//! lines give every stage an exact, fixed step latency. `None` slots are
//! pipeline bubbles and flow through delays like any other value.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

/// Per-column ring of the last `2 * window` image rows.
///
/// A push at column `u` shifts that column up one row and writes the new
/// pixel at the bottom, mirroring a chain of row SRAMs. Reading a window
/// column returns the bottom `window` values, oldest first.
pub struct LineBufferBank {
    width: usize,
    rows: usize,
    data: Vec<u8>,
    pushed: u64,
}

impl LineBufferBank {
    pub fn new(width: usize, window: usize) -> LineBufferBank {
        let rows = 2 * window;
        LineBufferBank {
            width,
            rows,
            data: vec![0; rows * width],
            pushed: 0,
        }
    }

    pub fn push(&mut self, u: usize, value: u8) {
        for r in 0..self.rows - 1 {
            self.data[r * self.width + u] = self.data[(r + 1) * self.width + u];
        }
        self.data[(self.rows - 1) * self.width + u] = value;
        self.pushed += 1;
    }

    /// Bottom `count` rows at column `u`, oldest (topmost) first.
    pub fn read_column(&self, u: usize, count: usize, out: &mut Vec<u8>) {
        out.clear();
        for r in self.rows - count..self.rows {
            out.push(self.data[r * self.width + u]);
        }
    }

    /// Rows that currently hold real data, saturating at the capacity.
    pub fn rows_live(&self) -> usize {
        let full = (self.pushed / self.width as u64) as usize;
        let partial = usize::from(self.pushed % self.width as u64 != 0);
        (full + partial).min(self.rows)
    }

    pub fn rows_capacity(&self) -> usize {
        self.rows
    }
}

/// `window x window` pixel register file; pushing a column shifts the
/// whole window left.
pub struct WindowBuffer {
    window: usize,
    /// Column-major: `cols[c * window + r]`.
    cols: Vec<u8>,
}

impl WindowBuffer {
    pub fn new(window: usize) -> WindowBuffer {
        WindowBuffer {
            window,
            cols: vec![0; window * window],
        }
    }

    pub fn push_column(&mut self, col: &[u8]) {
        debug_assert_eq!(col.len(), self.window);
        let w = self.window;
        self.cols.copy_within(w.., 0);
        self.cols[(w - 1) * w..].copy_from_slice(col);
    }

    /// Pixel at window column `wu` (left to right) and row `wv` (top to
    /// bottom).
    #[inline]
    pub fn at(&self, wu: usize, wv: usize) -> u8 {
        self.cols[wu * self.window + wv]
    }
}

/// Fixed-length FIFO modeling register stages: a push returns the value
/// from `len` pushes ago once the line has filled.
pub struct DelayLine<T> {
    len: usize,
    buf: VecDeque<T>,
}

impl<T> DelayLine<T> {
    pub fn new(len: usize) -> DelayLine<T> {
        DelayLine {
            len,
            buf: VecDeque::with_capacity(len + 1),
        }
    }

    pub fn push(&mut self, value: T) -> Option<T> {
        if self.len == 0 {
            return Some(value);
        }
        self.buf.push_back(value);
        if self.buf.len() > self.len {
            self.buf.pop_front()
        } else {
            None
        }
    }
}
