from hilbert_lab.group.elements import (
    EigenData,
    GroupElement,
    LyapunovTriple,
    eigen_data,
    evaluate_word,
    is_biproximal,
    periodic_lyapunov,
    so21_embed,
    translation_length,
)
from hilbert_lab.group.families import (
    FAMILIES,
    GeneratorFamily,
    Presentation,
    make_family,
    triangle_reflection_family,
    triangle_rotation_group,
)
from hilbert_lab.group.hull import ConicFit, chart_action, fit_conic, generate_domain_hull, hull_invariance_gap
from hilbert_lab.group.words import (
    ConjugacyClass,
    Enumeration,
    enumerate_conjugacy_classes,
    merge_conjugate_classes,
    reduced_words,
)
