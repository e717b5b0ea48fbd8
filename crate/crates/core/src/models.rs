//! Path loss model families behind one trait, registered by name.

use std::sync::Arc;

use crate::catalog::{Catalog, ModelKind, Selector};
use crate::error::Result;
use crate::fitting::{fit_ci_with, fit_cif_with, FitOptions, FitResult, MeasurementRecord};
use crate::pathloss::ModelParams;
use crate::registry::Registry;

pub trait ModelFamily: Send + Sync {
    fn name(&self) -> &'static str;

    fn fit(&self, records: &[MeasurementRecord], opts: &FitOptions) -> Result<FitResult>;

    /// Published parameters of this family at a catalog point.
    fn from_catalog(&self, sel: &Selector) -> Result<ModelParams>;
}

#[derive(Debug, Default)]
pub struct CiFamily;

impl ModelFamily for CiFamily {
    fn name(&self) -> &'static str {
        "ci"
    }

    fn fit(&self, records: &[MeasurementRecord], opts: &FitOptions) -> Result<FitResult> {
        fit_ci_with(records, opts)
    }

    fn from_catalog(&self, sel: &Selector) -> Result<ModelParams> {
        Catalog::v1().params_for(ModelKind::CiSingle, sel)
    }
}

#[derive(Debug, Default)]
pub struct CifFamily;

impl ModelFamily for CifFamily {
    fn name(&self) -> &'static str {
        "cif"
    }

    fn fit(&self, records: &[MeasurementRecord], opts: &FitOptions) -> Result<FitResult> {
        fit_cif_with(records, opts)
    }

    /// The multi-band CIF row for the selector's scenario; the band only
    /// sets where the model is evaluated.
    fn from_catalog(&self, sel: &Selector) -> Result<ModelParams> {
        Catalog::v1().params_for(ModelKind::CifMulti, sel)
    }
}

pub fn model_registry() -> Registry<dyn ModelFamily> {
    let mut r: Registry<dyn ModelFamily> = Registry::new("model");
    r.register("ci", Arc::new(CiFamily));
    r.register("cif", Arc::new(CifFamily));
    r
}
