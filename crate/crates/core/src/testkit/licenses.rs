use rand::Rng;

use super::TestRng;
use crate::license::{Duty, LicenseSpec, Permission, Prohibition};
use crate::rdf::Iri;

/// A consistent license with random attributes; ids come from a pool of
/// `pool` names so that collisions happen.
pub fn random_license(rng: &mut TestRng, pool: usize) -> LicenseSpec {
    let id = rng.gen_range(0..pool.max(1));
    let prohibitions: std::collections::BTreeSet<Prohibition> =
        Prohibition::ALL.iter().copied().filter(|_| rng.gen_bool(0.25)).collect();
    let permissions = Permission::ALL
        .iter()
        .copied()
        .filter(|p| !prohibitions.iter().any(|x| x.permission() == *p) && rng.gen_bool(0.7))
        .collect();
    LicenseSpec {
        id: Iri::new(format!("http://ex/license/{id}")).unwrap(),
        name: format!("License {id}"),
        permissions,
        duties: Duty::ALL.iter().copied().filter(|_| rng.gen_bool(0.4)).collect(),
        prohibitions,
        open: rng.gen_bool(0.5),
        known: true,
    }
}
