use std::fmt::{self, Write as _};

use super::N_FEATURES;

pub const FEATURE_SCHEMA_VERSION: &str = "seqforge.feature_schema.v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureGroup {
    Deleteriousness,
    Conservation,
    ProteinStructure,
    SequenceContext,
    Technical,
    Population,
    Reserved,
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureGroup::Deleteriousness => "deleteriousness",
            FeatureGroup::Conservation => "conservation",
            FeatureGroup::ProteinStructure => "protein_structure",
            FeatureGroup::SequenceContext => "sequence_context",
            FeatureGroup::Technical => "technical",
            FeatureGroup::Population => "population",
            FeatureGroup::Reserved => "reserved",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotInfo {
    pub slot: usize,
    pub name: String,
    pub group: FeatureGroup,
}

const NAMED: &[(&str, FeatureGroup)] = {
    use FeatureGroup::*;
    &[
        ("cadd_phred", Deleteriousness),
        ("polyphen2_score", Deleteriousness),
        ("sift_score", Deleteriousness),
        ("revel_like", Deleteriousness),
        ("mutation_taster_like", Deleteriousness),
        ("fathmm_like", Deleteriousness),
        ("phylop_score", Conservation),
        ("phastcons_score", Conservation),
        ("gerp_rs", Conservation),
        ("phylop_window_10", Conservation),
        ("phylop_window_50", Conservation),
        ("phylop_window_200", Conservation),
        ("secondary_structure_change", ProteinStructure),
        ("hydrophobicity_change", ProteinStructure),
        ("solvent_accessibility_change", ProteinStructure),
        ("side_chain_volume_change", ProteinStructure),
        ("charge_change", ProteinStructure),
        ("domain_overlap", ProteinStructure),
        ("gc_fraction", SequenceContext),
        ("homopolymer_length", SequenceContext),
        ("splice_site_distance", SequenceContext),
        ("cpg_context", SequenceContext),
        ("read_depth", Technical),
        ("mean_base_quality", Technical),
        ("strand_balance", Technical),
        ("mapping_quality", Technical),
        ("allele_frequency", Population),
        ("allele_frequency_max_pop", Population),
    ]
};

/// Default planted/selected set: deleteriousness, conservation and
/// structure slots dominate, mirroring the kinds of features that survive
/// elimination on real data.
pub const DEFAULT_INFORMATIVE: [usize; 17] = [0, 1, 2, 3, 4, 6, 7, 8, 9, 12, 13, 14, 15, 19, 20, 26, 27];

/// The fixed 63-slot variant feature layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    pub slots: Vec<SlotInfo>,
}

impl FeatureSchema {
    pub fn standard() -> Self {
        let slots = (0..N_FEATURES)
            .map(|slot| match NAMED.get(slot) {
                Some(&(name, group)) => SlotInfo { slot, name: name.to_string(), group },
                None => SlotInfo { slot, name: format!("reserved_{:02}", slot + 1), group: FeatureGroup::Reserved },
            })
            .collect();
        FeatureSchema { slots }
    }

    pub fn names(&self) -> Vec<String> {
        self.slots.iter().map(|s| s.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.slots.iter().position(|s| s.name == name)
    }

    /// Text manifest: one row per slot with its table column and group.
    pub fn manifest(&self) -> String {
        let mut s = crate::tsv::schema_line(FEATURE_SCHEMA_VERSION);
        s.push_str("slot\tcolumn\tname\tgroup\n");
        for info in &self.slots {
            writeln!(s, "{}\tf{:02}\t{}\t{}", info.slot, info.slot + 1, info.name, info.group).unwrap();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn sixty_three_unique_slots() {
        let s = FeatureSchema::standard();
        assert_eq!(s.slots.len(), 63);
        let names: HashSet<_> = s.names().into_iter().collect();
        assert_eq!(names.len(), 63);
        assert_eq!(s.index_of("cadd_phred"), Some(0));
        assert_eq!(s.index_of("reserved_63"), Some(62));
        assert_eq!(s.manifest().lines().count(), 65);
    }

    #[test]
    fn default_informative_is_valid() {
        let set: HashSet<_> = DEFAULT_INFORMATIVE.iter().collect();
        assert_eq!(set.len(), 17);
        assert!(DEFAULT_INFORMATIVE.iter().all(|&i| i < N_FEATURES));
    }
}
