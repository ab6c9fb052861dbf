//! Parameter sets of the figure presets (`fig5` .. `fig18`).

use cavcorr::{Kind, StateSpec};

/// Pseudo-Boltzmann state used for the "thermal" panels: 20 levels with
/// populations falling by `e^-2` per level.
pub const WARM_STATE: &str = "boltzmann:2,20";

/// Truncation used for every figure panel.
pub const FIGURE_L_MAX: usize = 19;

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub label: char,
    pub kind: Kind,
    pub g: f64,
    pub kappa: f64,
    pub delta1: f64,
    pub state: StateSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub name: &'static str,
    pub panels: Vec<Panel>,
}

fn four_states(kind: Kind, g: f64, kappa: f64) -> Vec<Panel> {
    ["ground", "mix:0,5", WARM_STATE, "equal:20"]
        .into_iter()
        .zip(['a', 'b', 'c', 'd'])
        .map(|(s, label)| Panel {
            label,
            kind,
            g,
            kappa,
            delta1: 0.1,
            state: s.parse().expect("figure states are valid"),
        })
        .collect()
}

fn spacing_sweep(kind: Kind, g: f64, kappa: f64) -> Vec<Panel> {
    [0.1, 0.3, 2.0, 0.5]
        .into_iter()
        .zip(['a', 'b', 'c', 'd'])
        .map(|(delta1, label)| Panel {
            label,
            kind,
            g,
            kappa,
            delta1,
            state: StateSpec::Mix(vec![0, 5]),
        })
        .collect()
}

pub fn figures() -> Vec<Figure> {
    use Kind::*;
    let fig = |name, panels| Figure { name, panels };
    vec![
        fig("fig5", four_states(G2Tt, 2.0, 5.0)),
        fig("fig6", four_states(G2Ff, 2.0, 5.0)),
        fig("fig7", four_states(G2Tt, 2.2, 10.0)),
        fig("fig8", four_states(G2Tt, 3.0, 0.1)),
        fig("fig9", four_states(G2Ff, 3.0, 0.1)),
        fig("fig10", four_states(G2Tt, 1.0, 0.77)),
        fig("fig11", spacing_sweep(G2Tt, 1.0, 1.6)),
        fig("fig12", spacing_sweep(G2Tt, 1.0, 1.6)),
        fig("fig14", four_states(HTt, 2.0, 5.0)),
        fig("fig15", four_states(HTt, 3.0, 0.1)),
        fig("fig16", four_states(HFf, 3.0, 0.1)),
        fig("fig17", four_states(HFf, 1.0, 0.77)),
        fig("fig18", four_states(HTt, 1.0, 0.77)),
    ]
}

pub fn figure(name: &str) -> Option<Figure> {
    figures().into_iter().find(|f| f.name == name)
}

pub fn names() -> Vec<&'static str> {
    figures().iter().map(|f| f.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_figure_has_four_panels() {
        for f in figures() {
            assert_eq!(f.panels.len(), 4, "{}", f.name);
        }
    }

    #[test]
    fn fig5_states() {
        let f = figure("fig5").unwrap();
        let s: Vec<String> = f.panels.iter().map(|p| p.state.to_string()).collect();
        assert_eq!(s, ["ground", "mix:0,5", WARM_STATE, "equal:20"]);
        assert!(figure("fig13").is_none());
    }
}
