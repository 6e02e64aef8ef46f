//! Parsing of complex literals like `0.5`, `-0.3+0.2i`, `0.7i`, `i`.

use num_complex::Complex;

pub type C64 = Complex<f64>;

/// Parse one complex literal. Accepts a real part, an imaginary part
/// (suffix `i`), or `a+bi` / `a-bi`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty complex literal".to_string());
    }
    if let Some(stripped) = s.strip_suffix(['i', 'I']) {
        // Find the sign that splits real and imaginary parts: the last
        // '+'/'-' that is not leading and not part of an exponent.
        let bytes = stripped.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let b = bytes[k];
            if (b == b'+' || b == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        match split {
            Some(k) => {
                let re: f64 = stripped[..k]
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad real part in {s:?}: {e}"))?;
                let im_str = stripped[k..].trim();
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str
                        .parse()
                        .map_err(|e| format!("bad imaginary part in {s:?}: {e}"))?
                };
                Ok(C64::new(re, im))
            }
            None => {
                let im: f64 = if stripped.is_empty() {
                    1.0
                } else if stripped == "-" {
                    -1.0
                } else {
                    stripped
                        .parse()
                        .map_err(|e| format!("bad imaginary part in {s:?}: {e}"))?
                };
                Ok(C64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = s.parse().map_err(|e| format!("bad complex literal {s:?}: {e}"))?;
        Ok(C64::new(re, 0.0))
    }
}

/// Parse a comma-separated list of complex literals.
pub fn parse_point(s: &str) -> Result<Vec<C64>, String> {
    s.split(',').map(parse_complex).collect()
}
