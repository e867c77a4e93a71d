#![allow(dead_code)]

use rutnet::artifact::ModelArtifact;
use rutnet::pipeline::{generate_csv, train_from_csv, TrainOptions};
use rutnet_core::mixture::{AggregateType, Gradation, MixType, MixtureDesign};
use rutnet_core::synth::SynthConfig;

pub fn small_csv() -> String {
    generate_csv(&SynthConfig {
        n_mixes: 8,
        points_per_curve: 40,
        ..SynthConfig::default()
    })
    .unwrap()
}

pub fn small_artifact() -> ModelArtifact {
    let opts = TrainOptions {
        max_epochs: 20,
        hidden: vec![16, 16],
        ..TrainOptions::default()
    };
    train_from_csv(small_csv().as_bytes(), &opts).unwrap().artifact
}

/// PG 58-28, AC 5.5, NMAS 12.5, plant-produced dense limestone, no recycled binder.
pub fn base_mix() -> MixtureDesign {
    MixtureDesign {
        mix_type: MixType::Plant,
        htpg_c: 58.0,
        ltpg_c: -28.0,
        ac_pct: 5.5,
        nmas_mm: 12.5,
        rap_pct: 0.0,
        ras_pct: 0.0,
        gradation: Gradation::Dense,
        agg_type: AggregateType::Limestone,
        crc_pct: 0.0,
    }
}
