//! Canonical text for elaborated objects. The output parses back to the
//! same objects; operational specifications print through their own
//! `Display`.

use std::fmt::Write;

use super::elaborate::Morphism;
use crate::edts::EdSignature;
use crate::ident::display;
use crate::refine::{AxiomaticSpec, Specification};

fn sig_items(out: &mut String, sig: &EdSignature) {
    let evs: Vec<String> = sig.events().iter().map(|e| display(e)).collect();
    writeln!(out, "events {};", evs.join(", ")).unwrap();
    if !sig.data().is_empty() {
        let attrs: Vec<String> = sig.data().iter().map(|(a, s)| format!("{}: {s}", display(a))).collect();
        writeln!(out, "attrs {};", attrs.join(", ")).unwrap();
    }
}

pub fn print_signature(name: &str, sig: &EdSignature) -> String {
    let mut out = format!("sig {}\n", display(name));
    sig_items(&mut out, sig);
    out
}

pub fn print_axiomatic(spec: &AxiomaticSpec) -> String {
    let mut out = format!("spec {}\n", display(spec.name()));
    sig_items(&mut out, spec.sig());
    for ax in spec.axioms() {
        writeln!(out, "axiom \"{}\": {};", ax.label, ax.sentence).unwrap();
    }
    out
}

pub fn print_spec(spec: &Specification) -> String {
    match spec {
        Specification::Axiomatic(a) => print_axiomatic(a),
        Specification::Operational(o) => o.to_string(),
    }
}

/// `source` and `target` name the signatures the morphism connects.
pub fn print_morphism(m: &Morphism, source: &str, target: &str) -> String {
    let mut out = format!("morphism {} : {} -> {} {{\n", display(m.name()), display(source), display(target));
    let attrs = match m {
        Morphism::Signature(s) => {
            for (e, f) in &s.events {
                writeln!(out, "  event {} -> {};", display(e), display(f)).unwrap();
            }
            &s.attrs
        }
        Morphism::EventRefinement(r) => {
            for (e, th) in &r.events {
                writeln!(out, "  event {} -> {th};", display(e)).unwrap();
            }
            &r.attrs
        }
    };
    for (a, b) in attrs {
        writeln!(out, "  attr {} -> {};", display(a), display(b)).unwrap();
    }
    out.push_str("}\n");
    out
}
