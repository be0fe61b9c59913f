from .encoding import (
    SiteIndex,
    basis_index,
    decode,
    detection_sites,
    dimension,
    encode,
    ordered_sites,
    parse_site,
    site_basis_index,
)
from .hamiltonian import (
    IonSpec,
    LaserParams,
    build_ideal_hamiltonian,
    build_ion_hamiltonian,
    ion_hamiltonian_lattice_form,
    laser_to_links,
    lattice_hamiltonian,
    link_to_laser,
    lowering_operator,
    off_resonant_excitation_estimate,
)
