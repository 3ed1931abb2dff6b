//! Lexical feature extraction and divide-by-max normalization.
//!
//! Five features are computed on the scheme-stripped URL string: character
//! length, dot count, hyphen presence, special-character count, and whether
//! the host is a literal IPv4 address. Counts are in Unicode scalar values.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of lexical feature columns.
pub const LEXICAL_DIM: usize = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatureError {
    #[error("URL is empty")]
    EmptyUrl,
}

/// Raw (unnormalized) lexical features of one URL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawFeatures {
    pub url_length: u32,
    pub num_dots: u32,
    pub has_hyphen: bool,
    pub num_special_chars: u32,
    pub has_ip: bool,
}

impl RawFeatures {
    /// Column order is fixed: length, dots, hyphen, special chars, IP.
    pub fn to_array(self) -> [f64; LEXICAL_DIM] {
        [
            f64::from(self.url_length),
            f64::from(self.num_dots),
            if self.has_hyphen { 1.0 } else { 0.0 },
            f64::from(self.num_special_chars),
            if self.has_ip { 1.0 } else { 0.0 },
        ]
    }
}

/// A normalized feature row; every component lies in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; LEXICAL_DIM]);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Remove a leading `http://` or `https://` (case-insensitive). Other
/// schemes are left alone.
pub fn strip_scheme(url: &str) -> &str {
    for prefix in ["http://", "https://"] {
        if url.len() >= prefix.len() && url[..prefix.len()].eq_ignore_ascii_case(prefix) {
            return &url[prefix.len()..];
        }
    }
    url
}

fn is_ipv4_host(host: &str) -> bool {
    let octets: Vec<&str> = host.split('.').collect();
    octets.len() == 4
        && octets.iter().all(|o| {
            !o.is_empty()
                && o.len() <= 3
                && o.chars().all(|c| c.is_ascii_digit())
                && o.parse::<u16>().is_ok_and(|v| v <= 255)
        })
}

/// Compute the five lexical features on the scheme-stripped string.
pub fn extract_lexical(url: &str) -> Result<RawFeatures, FeatureError> {
    if url.trim().is_empty() {
        return Err(FeatureError::EmptyUrl);
    }
    let stripped = strip_scheme(url);
    let mut url_length = 0u32;
    let mut num_dots = 0u32;
    let mut has_hyphen = false;
    let mut num_special_chars = 0u32;
    for c in stripped.chars() {
        url_length += 1;
        match c {
            '.' => num_dots += 1,
            '-' => has_hyphen = true,
            _ if !c.is_alphanumeric() => num_special_chars += 1,
            _ => {}
        }
    }
    let host = stripped.split('/').next().unwrap_or("");
    Ok(RawFeatures {
        url_length,
        num_dots,
        has_hyphen,
        num_special_chars,
        has_ip: is_ipv4_host(host),
    })
}

/// Per-column maxima fitted on training data; normalization divides each
/// column by its maximum and clamps to [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    maxima: [f64; LEXICAL_DIM],
}

impl Normalizer {
    /// Fit column maxima. A column whose maximum is zero stores 1 so that
    /// the division is a no-op.
    pub fn fit(rows: &[RawFeatures]) -> Result<Normalizer, FeatureError> {
        if rows.is_empty() {
            return Err(FeatureError::EmptyUrl);
        }
        let mut maxima = [0.0; LEXICAL_DIM];
        for row in rows {
            for (m, v) in maxima.iter_mut().zip(row.to_array()) {
                if v > *m {
                    *m = v;
                }
            }
        }
        for m in &mut maxima {
            if *m == 0.0 {
                *m = 1.0;
            }
        }
        Ok(Normalizer { maxima })
    }

    pub fn maxima(&self) -> &[f64; LEXICAL_DIM] {
        &self.maxima
    }

    pub fn normalize(&self, raw: RawFeatures) -> FeatureVector {
        let mut out = raw.to_array();
        for (v, m) in out.iter_mut().zip(self.maxima) {
            *v = (*v / m).clamp(0.0, 1.0);
        }
        FeatureVector(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strip_scheme_handles_http_https_and_others() {
        assert_eq!(
            strip_scheme("http://phishingsite.com/login"),
            "phishingsite.com/login"
        );
        assert_eq!(strip_scheme("HTTPS://A.com"), "A.com");
        assert_eq!(strip_scheme("ftp://x.com"), "ftp://x.com");
        assert_eq!(strip_scheme("no-scheme.com"), "no-scheme.com");
    }

    #[test]
    fn reference_phishing_row_extracts_exactly() {
        let f = extract_lexical("http://phishingsite.com/login").unwrap();
        assert_eq!(f.url_length, 22);
        assert_eq!(f.num_dots, 1);
        assert!(!f.has_hyphen);
        assert_eq!(f.num_special_chars, 1);
        assert!(!f.has_ip);
    }

    #[test]
    fn ipv4_host_is_detected() {
        let f = extract_lexical("192.168.0.1/x").unwrap();
        assert!(f.has_ip);
        assert_eq!(f.num_dots, 3);
        assert!(!extract_lexical("256.1.1.1/x").unwrap().has_ip);
        assert!(!extract_lexical("1.2.3/x").unwrap().has_ip);
        assert!(!extract_lexical("1.2.3.4.5").unwrap().has_ip);
        assert!(!extract_lexical("192.168.0.1:80/x").unwrap().has_ip);
        assert!(extract_lexical("http://10.0.0.255").unwrap().has_ip);
    }

    #[test]
    fn hyphen_and_dot_counting() {
        let f = extract_lexical("a-b.com").unwrap();
        assert_eq!(f.url_length, 7);
        assert_eq!(f.num_dots, 1);
        assert!(f.has_hyphen);
        assert_eq!(f.num_special_chars, 0);
    }

    #[test]
    fn empty_url_is_rejected() {
        assert_eq!(extract_lexical(""), Err(FeatureError::EmptyUrl));
        assert_eq!(extract_lexical("   "), Err(FeatureError::EmptyUrl));
    }

    #[test]
    fn unicode_counts_scalar_values_not_bytes() {
        let f = extract_lexical("é.com").unwrap();
        assert_eq!(f.url_length, 5);
        assert_eq!(f.num_special_chars, 0);
    }

    fn lengths_only(lengths: &[u32]) -> Vec<RawFeatures> {
        lengths
            .iter()
            .map(|&l| RawFeatures {
                url_length: l,
                num_dots: 0,
                has_hyphen: false,
                num_special_chars: 0,
                has_ip: false,
            })
            .collect()
    }

    #[test]
    fn fit_records_column_maxima() {
        let norm = Normalizer::fit(&lengths_only(&[19, 22, 28, 21])).unwrap();
        assert_eq!(norm.maxima()[0], 28.0);
        // all-zero columns store 1 so division is a no-op
        assert_eq!(norm.maxima()[1], 1.0);
        assert_eq!(norm.maxima()[4], 1.0);
    }

    #[test]
    fn fit_on_empty_list_fails() {
        assert!(Normalizer::fit(&[]).is_err());
    }

    #[test]
    fn normalize_divides_by_max() {
        let rows = lengths_only(&[19, 22, 28, 21]);
        let norm = Normalizer::fit(&rows).unwrap();
        let got: Vec<f64> = rows.iter().map(|&r| norm.normalize(r).0[0]).collect();
        let expected = [19.0 / 28.0, 22.0 / 28.0, 1.0, 0.75];
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-12, "{g} vs {e}");
        }
        // printed at two decimals these read 0.68, 0.79, 1.00, 0.75
        assert!((got[0] - 0.6786).abs() < 5e-5);
        assert!((got[1] - 0.7857).abs() < 5e-5);
    }

    #[test]
    fn normalize_dot_column() {
        let rows: Vec<RawFeatures> = [2u32, 1]
            .iter()
            .map(|&d| RawFeatures {
                url_length: 10,
                num_dots: d,
                has_hyphen: false,
                num_special_chars: 0,
                has_ip: false,
            })
            .collect();
        let norm = Normalizer::fit(&rows).unwrap();
        assert_eq!(norm.normalize(rows[0]).0[1], 1.0);
        assert_eq!(norm.normalize(rows[1]).0[1], 0.5);
    }

    #[test]
    fn values_above_the_fitted_max_clamp_to_one() {
        let norm = Normalizer::fit(&lengths_only(&[19, 22, 28, 21])).unwrap();
        let v = norm.normalize(lengths_only(&[40])[0]);
        assert_eq!(v.0[0], 1.0);
    }

    #[test]
    fn single_row_normalizes_to_ones_and_zeros() {
        let row = RawFeatures {
            url_length: 9,
            num_dots: 2,
            has_hyphen: false,
            num_special_chars: 0,
            has_ip: true,
        };
        let norm = Normalizer::fit(&[row]).unwrap();
        assert_eq!(norm.normalize(row).0, [1.0, 1.0, 0.0, 0.0, 1.0]);
    }

    proptest! {
        #[test]
        fn extraction_is_pure_and_accounts_every_char(url in "[a-z0-9./:?=-]{1,40}") {
            let a = extract_lexical(&url).unwrap();
            let b = extract_lexical(&url).unwrap();
            prop_assert_eq!(a, b);

            let stripped = strip_scheme(&url);
            let alnum = stripped.chars().filter(|c| c.is_alphanumeric()).count() as u32;
            let hyphens = stripped.chars().filter(|&c| c == '-').count() as u32;
            prop_assert_eq!(
                a.num_special_chars + a.num_dots + alnum + hyphens,
                a.url_length
            );
        }

        #[test]
        fn normalized_output_stays_in_unit_interval(
            rows in proptest::collection::vec((0u32..500, 0u32..20, any::<bool>(), 0u32..30, any::<bool>()), 1..30),
            probe in (0u32..1000, 0u32..40, any::<bool>(), 0u32..60, any::<bool>()),
        ) {
            let to_raw = |(l, d, h, s, ip): (u32, u32, bool, u32, bool)| RawFeatures {
                url_length: l,
                num_dots: d,
                has_hyphen: h,
                num_special_chars: s,
                has_ip: ip,
            };
            let raws: Vec<RawFeatures> = rows.into_iter().map(to_raw).collect();
            let norm = Normalizer::fit(&raws).unwrap();
            for &r in &raws {
                for v in norm.normalize(r).0 {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
            }
            for v in norm.normalize(to_raw(probe)).0 {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
