//! Process-CPU stopwatch for solver timing. Timed sections are
//! single-threaded, so CPU time excludes scheduler noise and any I/O done
//! around the solve. On wasm there is no usable clock; traces there carry
//! sweep indices with zeroed timestamps.

#[cfg(all(unix, not(target_arch = "wasm32")))]
pub struct Stopwatch {
    start: f64,
}

#[cfg(all(unix, not(target_arch = "wasm32")))]
impl Stopwatch {
    pub fn start() -> Self {
        Stopwatch {
            start: cpu_seconds(),
        }
    }

    pub fn elapsed_seconds(&self) -> f64 {
        cpu_seconds() - self.start
    }
}

#[cfg(all(unix, not(target_arch = "wasm32")))]
fn cpu_seconds() -> f64 {
    let mut ts = libc::timespec {
        tv_sec: 0,
        tv_nsec: 0,
    };
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return 0.0;
    }
    ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
}

#[cfg(target_arch = "wasm32")]
pub struct Stopwatch;

#[cfg(target_arch = "wasm32")]
impl Stopwatch {
    pub fn start() -> Self {
        Stopwatch
    }

    pub fn elapsed_seconds(&self) -> f64 {
        0.0
    }
}

#[cfg(all(not(unix), not(target_arch = "wasm32")))]
pub struct Stopwatch {
    start: std::time::Instant,
}

#[cfg(all(not(unix), not(target_arch = "wasm32")))]
impl Stopwatch {
    pub fn start() -> Self {
        Stopwatch {
            start: std::time::Instant::now(),
        }
    }

    pub fn elapsed_seconds(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elapsed_is_monotone() {
        let sw = Stopwatch::start();
        let mut x = 0.0f64;
        for i in 0..200_000 {
            x += (i as f64).sqrt();
        }
        assert!(x > 0.0);
        let t1 = sw.elapsed_seconds();
        let t2 = sw.elapsed_seconds();
        assert!(t1 >= 0.0);
        assert!(t2 >= t1);
    }
}
