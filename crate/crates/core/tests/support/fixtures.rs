//! Paths to the fixture projects and a number-to-words renderer.

use std::path::PathBuf;

pub fn fixture_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture(name: &str) -> PathBuf {
    fixture_dir(name).join("project.json")
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_dir(name).join("text.txt")).unwrap()
}

const UNITS: [&str; 9] = ["واحد", "اثنان", "ثلاثة", "أربعة", "خمسة", "ستة", "سبعة", "ثمانية", "تسعة"];
const TENS: [&str; 8] = ["عشرون", "ثلاثون", "أربعون", "خمسون", "ستون", "سبعون", "ثمانون", "تسعون"];

fn under_1000(n: u32, out: &mut Vec<&'static str>) {
    let (h, r) = (n / 100, n % 100);
    if h == 1 {
        out.push("مائة");
    } else if h > 1 {
        out.extend([UNITS[h as usize - 1], "مائة"]);
    }
    match r {
        0 => {}
        1..=9 => out.push(UNITS[r as usize - 1]),
        10 => out.push("عشرة"),
        11..=19 => out.extend([UNITS[r as usize - 11], "عشر"]),
        _ => {
            if r % 10 != 0 {
                out.push(UNITS[(r % 10) as usize - 1]);
            }
            out.push(TENS[(r / 10) as usize - 2]);
        }
    }
}

/// Spells `n` in `1..1_000_000` as number words; with `conj`, every word
/// after the first carries the conjunction prefix.
pub fn render_number(n: u32, conj: bool) -> String {
    assert!((1..1_000_000).contains(&n));
    let mut words = Vec::new();
    let (t, r) = (n / 1000, n % 1000);
    if t == 1 {
        words.push("ألف");
    } else if t > 1 {
        under_1000(t, &mut words);
        words.push("ألف");
    }
    under_1000(r, &mut words);
    words
        .iter()
        .enumerate()
        .map(|(i, w)| if conj && i > 0 { format!("و{w}") } else { w.to_string() })
        .collect::<Vec<_>>()
        .join(" ")
}
