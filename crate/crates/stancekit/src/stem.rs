//! Porter suffix stripping.
//!
//! Implements the classic five-step Porter algorithm over lowercased words.
//! Words of one or two characters are returned unchanged. The function is
//! total: tokens containing digits or punctuation simply flow through the
//! consonant/vowel logic unchanged unless a rule happens to fire.

/// True when position `i` of `w` holds a consonant under Porter's rules:
/// `a e i o u` are vowels, and `y` is a vowel exactly when it follows a
/// consonant.
fn is_cons(w: &[char], i: usize) -> bool {
    match w[i] {
        'a' | 'e' | 'i' | 'o' | 'u' => false,
        'y' => i == 0 || !is_cons(w, i - 1),
        _ => true,
    }
}

/// Porter's measure: the number of vowel-consonant sequences in `w`.
fn measure(w: &[char]) -> usize {
    let n = w.len();
    let mut i = 0;
    let mut m = 0;
    while i < n && is_cons(w, i) {
        i += 1;
    }
    loop {
        while i < n && !is_cons(w, i) {
            i += 1;
        }
        if i == n {
            return m;
        }
        m += 1;
        while i < n && is_cons(w, i) {
            i += 1;
        }
        if i == n {
            return m;
        }
    }
}

fn has_vowel(w: &[char]) -> bool {
    (0..w.len()).any(|i| !is_cons(w, i))
}

fn ends_double_cons(w: &[char]) -> bool {
    let n = w.len();
    n >= 2 && w[n - 1] == w[n - 2] && is_cons(w, n - 1)
}

/// True when `w` ends consonant-vowel-consonant and the final consonant is
/// not `w`, `x`, or `y`.
fn ends_cvc(w: &[char]) -> bool {
    let n = w.len();
    n >= 3
        && is_cons(w, n - 3)
        && !is_cons(w, n - 2)
        && is_cons(w, n - 1)
        && !matches!(w[n - 1], 'w' | 'x' | 'y')
}

struct Stemmer {
    w: Vec<char>,
}

impl Stemmer {
    fn ends(&self, suffix: &str) -> bool {
        let s: Vec<char> = suffix.chars().collect();
        self.w.len() >= s.len() && self.w[self.w.len() - s.len()..] == s[..]
    }

    fn stem_part(&self, suffix: &str) -> &[char] {
        &self.w[..self.w.len() - suffix.chars().count()]
    }

    fn truncate(&mut self, suffix: &str) {
        let keep = self.w.len() - suffix.chars().count();
        self.w.truncate(keep);
    }

    fn replace(&mut self, suffix: &str, with: &str) {
        self.truncate(suffix);
        self.w.extend(with.chars());
    }

    /// Apply the first rule of `rules` whose suffix matches, and only if the
    /// measure of the remaining stem exceeds `min_measure`. Porter's steps
    /// commit to the longest matching suffix even when its condition fails,
    /// so `rules` must be ordered longest suffix first.
    fn apply_table(&mut self, rules: &[(&str, &str)], min_measure: usize) {
        for &(suffix, with) in rules {
            if self.ends(suffix) {
                if measure(self.stem_part(suffix)) > min_measure {
                    self.replace(suffix, with);
                }
                return;
            }
        }
    }

    fn step_1a(&mut self) {
        if self.ends("sses") {
            self.replace("sses", "ss");
        } else if self.ends("ies") {
            self.replace("ies", "i");
        } else if self.ends("ss") {
            // keep
        } else if self.ends("s") {
            self.truncate("s");
        }
    }

    fn step_1b(&mut self) {
        if self.ends("eed") {
            if measure(self.stem_part("eed")) > 0 {
                self.replace("eed", "ee");
            }
            return;
        }
        let removed = if self.ends("ed") && has_vowel(self.stem_part("ed")) {
            self.truncate("ed");
            true
        } else if self.ends("ing") && has_vowel(self.stem_part("ing")) {
            self.truncate("ing");
            true
        } else {
            false
        };
        if !removed {
            return;
        }
        if self.ends("at") || self.ends("bl") || self.ends("iz") {
            self.w.push('e');
        } else if ends_double_cons(&self.w) && !matches!(self.w[self.w.len() - 1], 'l' | 's' | 'z')
        {
            self.w.pop();
        } else if measure(&self.w) == 1 && ends_cvc(&self.w) {
            self.w.push('e');
        }
    }

    fn step_1c(&mut self) {
        if self.ends("y") && has_vowel(self.stem_part("y")) {
            let last = self.w.len() - 1;
            self.w[last] = 'i';
        }
    }

    fn step_2(&mut self) {
        const RULES: &[(&str, &str)] = &[
            ("ational", "ate"),
            ("ization", "ize"),
            ("iveness", "ive"),
            ("fulness", "ful"),
            ("ousness", "ous"),
            ("tional", "tion"),
            ("biliti", "ble"),
            ("entli", "ent"),
            ("ousli", "ous"),
            ("ation", "ate"),
            ("alism", "al"),
            ("aliti", "al"),
            ("iviti", "ive"),
            ("enci", "ence"),
            ("anci", "ance"),
            ("izer", "ize"),
            ("abli", "able"),
            ("alli", "al"),
            ("ator", "ate"),
            ("eli", "e"),
        ];
        self.apply_table(RULES, 0);
    }

    fn step_3(&mut self) {
        const RULES: &[(&str, &str)] = &[
            ("icate", "ic"),
            ("ative", ""),
            ("alize", "al"),
            ("iciti", "ic"),
            ("ical", "ic"),
            ("ful", ""),
            ("ness", ""),
        ];
        self.apply_table(RULES, 0);
    }

    fn step_4(&mut self) {
        const RULES: &[(&str, &str)] = &[
            ("ement", ""),
            ("ance", ""),
            ("ence", ""),
            ("able", ""),
            ("ible", ""),
            ("ment", ""),
            ("ant", ""),
            ("ent", ""),
            ("ism", ""),
            ("ate", ""),
            ("iti", ""),
            ("ous", ""),
            ("ive", ""),
            ("ize", ""),
            ("ion", ""),
            ("al", ""),
            ("er", ""),
            ("ic", ""),
            ("ou", ""),
        ];
        for &(suffix, _) in RULES {
            if self.ends(suffix) {
                let stem = self.stem_part(suffix);
                let fires = measure(stem) > 1
                    && (suffix != "ion" || matches!(stem.last(), Some('s') | Some('t')));
                if fires {
                    self.truncate(suffix);
                }
                return;
            }
        }
    }

    fn step_5a(&mut self) {
        if !self.ends("e") {
            return;
        }
        let stem = self.stem_part("e");
        let m = measure(stem);
        if m > 1 || (m == 1 && !ends_cvc(stem)) {
            self.truncate("e");
        }
    }

    fn step_5b(&mut self) {
        if measure(&self.w) > 1 && ends_double_cons(&self.w) && *self.w.last().unwrap() == 'l' {
            self.w.pop();
        }
    }
}

/// Stem one word with the Porter algorithm. Input is lowercased first;
/// words shorter than three characters come back unchanged.
pub fn stem(word: &str) -> String {
    let lower = word.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    if chars.len() <= 2 {
        return lower;
    }
    let mut s = Stemmer { w: chars };
    s.step_1a();
    s.step_1b();
    s.step_1c();
    s.step_2();
    s.step_3();
    s.step_4();
    s.step_5a();
    s.step_5b();
    s.w.into_iter().collect()
}
