from hilbert_lab.entropy.orbit import chi_plus_lower_bound, orbit_entropy, orbital_length_spectrum, ruelle_bound
from hilbert_lab.entropy.volume import EntropyEstimate, ball_volumes, volume_entropy
