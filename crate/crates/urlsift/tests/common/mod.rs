//! Shared fixtures for the integration suites: a small hand-built corpus
//! and a seeded synthetic corpus generator with class-dependent URL shapes.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::path::Path;

const WORDS: [&str; 32] = [
    "alpha", "bravo", "cedar", "delta", "ember", "falcon", "grove", "harbor", "indigo", "juniper",
    "kestrel", "lumen", "maple", "nectar", "onyx", "poplar", "quartz", "raven", "sable", "tundra",
    "umber", "vertex", "willow", "xenon", "yarrow", "zephyr", "argon", "basil", "cobalt", "dune",
    "elm", "fern",
];

const TLDS: [&str; 5] = ["com", "org", "net", "io", "co"];

fn word(rng: &mut ChaCha8Rng) -> &'static str {
    WORDS[rng.gen_range(0..WORDS.len())]
}

fn tld(rng: &mut ChaCha8Rng) -> &'static str {
    TLDS[rng.gen_range(0..TLDS.len())]
}

fn benign_url(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..20) {
        0..=6 => format!("http://www.{}{}.{}", word(rng), word(rng), tld(rng)),
        7..=11 => format!("http://{}.{}", word(rng), tld(rng)),
        12..=14 => format!("http://{}.{}/{}", word(rng), tld(rng), word(rng)),
        15..=16 => format!(
            "http://{}.{}/{}/{}",
            word(rng),
            tld(rng),
            word(rng),
            word(rng)
        ),
        // search pages and hyphenated brands overlap the malicious shapes
        17..=18 => format!(
            "http://{}.{}/search?q={}",
            word(rng),
            tld(rng),
            word(rng)
        ),
        _ => format!("http://{}-{}.{}", word(rng), word(rng), tld(rng)),
    }
}

fn defacement_url(rng: &mut ChaCha8Rng) -> String {
    let n: u32 = rng.gen_range(1..9000);
    match rng.gen_range(0..4) {
        0 => format!(
            "http://{}{}.{}/{}/index.php?id={}",
            word(rng),
            word(rng),
            tld(rng),
            word(rng),
            n
        ),
        1 => format!(
            "http://{}.{}/gallery/{}?page={}",
            word(rng),
            tld(rng),
            word(rng),
            n
        ),
        2 => format!(
            "http://{}{}.{}/{}/view.asp?cat={}&id={}",
            word(rng),
            word(rng),
            tld(rng),
            word(rng),
            word(rng),
            n
        ),
        // plain hacked pages without query strings
        _ => format!("http://{}.{}/{}", word(rng), tld(rng), word(rng)),
    }
}

fn phishing_url(rng: &mut ChaCha8Rng) -> String {
    let n: u32 = rng.gen_range(10..100000);
    match rng.gen_range(0..8) {
        0 | 1 => format!(
            "http://{}-{}.{}.{}/login?session={}",
            word(rng),
            word(rng),
            word(rng),
            tld(rng),
            n
        ),
        2 | 3 => format!(
            "http://secure-{}.{}-{}.{}/verify/account?uid={}&token={}",
            word(rng),
            word(rng),
            word(rng),
            tld(rng),
            n,
            word(rng)
        ),
        4 | 5 => format!(
            "http://{}.{}.{}-signin.{}/update?user={}",
            word(rng),
            word(rng),
            word(rng),
            tld(rng),
            n
        ),
        // short clean lures that sit inside the benign feature range
        6 => format!("http://{}{}.{}/login", word(rng), word(rng), tld(rng)),
        _ => format!("http://{}.{}.{}/account", word(rng), word(rng), tld(rng)),
    }
}

fn malware_url(rng: &mut ChaCha8Rng) -> String {
    let n: u32 = rng.gen_range(1..60000);
    match rng.gen_range(0..4) {
        0 | 1 => {
            let ip = format!(
                "{}.{}.{}.{}",
                rng.gen_range(11..240),
                rng.gen_range(0..256),
                rng.gen_range(0..256),
                rng.gen_range(1..255)
            );
            format!("http://{ip}/{}.exe?download={}", word(rng), n)
        }
        2 => format!(
            "http://{}{}{}.{}/payload/{}.bin?key={}",
            word(rng),
            rng.gen_range(0..100),
            word(rng),
            tld(rng),
            word(rng),
            n
        ),
        _ => format!(
            "http://{}.{}/files/{}.scr?c={}&v={}",
            word(rng),
            tld(rng),
            word(rng),
            n,
            word(rng)
        ),
    }
}

/// Deterministic synthetic corpus CSV with roughly the real corpus class
/// mix: 65.7% benign, 14.8% defacement, 14.5% phishing, 5% malware. All
/// URLs are unique.
pub fn synthetic_corpus_csv(total: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let benign = (total as f64 * 0.657).round() as usize;
    let defacement = (total as f64 * 0.148).round() as usize;
    let phishing = (total as f64 * 0.145).round() as usize;
    let malware = total - benign - defacement - phishing;

    let mut rows: Vec<(String, &'static str)> = Vec::with_capacity(total);
    let mut seen: HashSet<String> = HashSet::with_capacity(total);
    let fill = |count: usize,
                    class: &'static str,
                    gen: fn(&mut ChaCha8Rng) -> String,
                    rng: &mut ChaCha8Rng,
                    rows: &mut Vec<(String, &'static str)>,
                    seen: &mut HashSet<String>| {
        let mut made = 0;
        while made < count {
            let url = gen(rng);
            if seen.insert(url.clone()) {
                rows.push((url, class));
                made += 1;
            }
        }
    };
    fill(benign, "benign", benign_url, &mut rng, &mut rows, &mut seen);
    fill(
        defacement,
        "defacement",
        defacement_url,
        &mut rng,
        &mut rows,
        &mut seen,
    );
    fill(
        phishing,
        "phishing",
        phishing_url,
        &mut rng,
        &mut rows,
        &mut seen,
    );
    fill(malware, "malware", malware_url, &mut rng, &mut rows, &mut seen);

    // interleave classes deterministically
    use rand::seq::SliceRandom;
    rows.shuffle(&mut rng);

    let mut csv = String::from("url,type\n");
    for (url, class) in rows {
        csv.push_str(&url);
        csv.push(',');
        csv.push_str(class);
        csv.push('\n');
    }
    csv
}

pub fn write_synthetic_corpus(path: &Path, total: usize, seed: u64) {
    std::fs::write(path, synthetic_corpus_csv(total, seed)).unwrap();
}

/// Forty handcrafted URLs, ten per class, with sharply separated lexical
/// profiles: benign rows have no special characters, defacement rows have
/// query paths, phishing rows carry hyphens, malware rows have IP hosts.
pub fn toy_corpus_csv() -> String {
    let mut csv = String::from("url,type\n");
    let benign = [
        "www.alpha.com",
        "beta.org",
        "www.cedar.net",
        "delta.com",
        "www.ember.io",
        "falcon.org",
        "www.grove.com",
        "harbor.net",
        "www.indigo.co",
        "juniper.com",
    ];
    let defacement = [
        "kestrel.com/index.php?id=12",
        "lumen.org/view.asp?cat=7",
        "maple.net/page?id=99",
        "nectar.com/gallery?img=3",
        "onyx.org/index.php?id=41",
        "poplar.com/view.asp?cat=2",
        "quartz.net/page?id=18",
        "raven.com/gallery?img=9",
        "sable.org/index.php?id=77",
        "tundra.com/view.asp?cat=5",
    ];
    let phishing = [
        "secure-umber.com/login",
        "vertex-pay.net/signin",
        "willow-bank.com/verify",
        "xenon-mail.org/account",
        "yarrow-login.com/update",
        "zephyr-safe.net/confirm",
        "argon-credit.com/portal",
        "basil-wallet.org/access",
        "cobalt-id.com/check",
        "dune-funds.net/renew",
    ];
    let malware = [
        "23.41.5.9/setup.exe",
        "77.12.90.3/loader.exe",
        "101.44.2.18/patch.exe",
        "12.200.7.61/install.exe",
        "88.31.44.2/update.exe",
        "190.8.66.15/tool.exe",
        "45.90.112.7/fix.exe",
        "66.27.4.133/driver.exe",
        "120.55.9.40/codec.exe",
        "31.7.88.214/plugin.exe",
    ];
    for (urls, class) in [
        (benign, "benign"),
        (defacement, "defacement"),
        (phishing, "phishing"),
        (malware, "malware"),
    ] {
        for url in urls {
            csv.push_str(url);
            csv.push(',');
            csv.push_str(class);
            csv.push('\n');
        }
    }
    csv
}

/// A configuration scaled down for fast integration tests.
pub fn small_pipeline_config() -> urlsift::pipeline::PipelineConfig {
    use urlsift::pipeline::PipelineConfig;
    let mut config = PipelineConfig::default();
    config.som.rows = 4;
    config.som.cols = 4;
    config.som.iterations = 80;
    config.som.initial_radius = 1.5;
    config.gd.epochs = 120;
    config.num_centers = 16;
    config.tabu.iterations = 40;
    config.tabu.stop_after_non_improving = 40;
    config
}
