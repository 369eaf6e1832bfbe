//! Named experiment documents shipped with the binary.

pub const PRESETS: [(&str, &str); 4] = [
    ("fig2", include_str!("../presets/fig2.json")),
    ("fig5", include_str!("../presets/fig5.json")),
    ("fig8", include_str!("../presets/fig8.json")),
    ("fig10", include_str!("../presets/fig10.json")),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}
