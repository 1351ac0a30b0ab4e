//! Best-effort peak memory readings. Only Linux procfs is supported;
//! elsewhere every reading is `None`.

use std::fs;

/// Resets the peak resident set size so the next [`peak_bytes`] covers
/// only what runs after this call. Returns false when unsupported.
pub fn reset_peak() -> bool {
    fs::write("/proc/self/clear_refs", "5").is_ok()
}

/// Peak resident set size of this process, in bytes.
pub fn peak_bytes() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    parse_vm_hwm(&status)
}

fn parse_vm_hwm(status: &str) -> Option<u64> {
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let mut fields = line.split_whitespace().skip(1);
    let value: u64 = fields.next()?.parse().ok()?;
    match fields.next() {
        Some("kB") => Some(value * 1024),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_status_line() {
        let status = "Name:\tx\nVmPeak:\t  100 kB\nVmHWM:\t    1932 kB\nVmRSS:\t 10 kB\n";
        assert_eq!(parse_vm_hwm(status), Some(1932 * 1024));
        assert_eq!(parse_vm_hwm("VmHWM: 12 MB"), None);
        assert_eq!(parse_vm_hwm(""), None);
    }
}
