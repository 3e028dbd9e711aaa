// SPDX-License-Identifier: Apache-2.0

//! File formats, run orchestration and the `pcut` command line on top of
//! [`pcut_core`].

pub mod io;
pub mod run;

pub use pcut_core;
