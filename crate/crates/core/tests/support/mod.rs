#![allow(dead_code)]

pub mod oracle;
pub mod fixtures;
pub mod syn_oracle;
pub mod diff_oracle;
