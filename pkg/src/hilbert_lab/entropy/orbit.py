"""Closed-orbit counting entropy and the exponent bound on it."""

from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from hilbert_lab import const
from hilbert_lab.entropy.volume import EntropyEstimate
from hilbert_lab.group.elements import GroupElement, is_biproximal, periodic_lyapunov, translation_length
from hilbert_lab.group.families import Presentation
from hilbert_lab.group.words import enumerate_conjugacy_classes
from hilbert_lab.utils.errors import InvalidParameterError, SpectrumTooSmallError
from hilbert_lab.utils.logging import get_logger

logger = get_logger("entropy.orbit")

# Oriented closed orbits: a class and the class of its inverse are counted
# separately unless they coincide.
ORIENTATION = "oriented"

# Number of length cutoffs in the counting grid.
COUNT_GRID = 40


def orbital_length_spectrum(
    generators: Sequence[GroupElement],
    max_len: int,
    presentation: Optional[Presentation] = None,
    threads: int = 1,
) -> pd.DataFrame:
    """Lengths of the closed orbits given by the biproximal classes up to ``max_len``.

    Returns
    -------
    pd.DataFrame
        One row per biproximal class, sorted by length, with columns
        ``word``, ``word_length``, ``length`` and ``eta``, the mean transport
        exponent of the orbit weighted by multiplicity.

    """
    enumeration = enumerate_conjugacy_classes(generators, max_len, presentation, threads)
    rows = []
    for c in enumeration:
        if not is_biproximal(c.element):
            continue
        triples = periodic_lyapunov(c.element)
        weights = np.array([t.multiplicity for t in triples], dtype=float)
        etas = np.array([t.eta for t in triples])
        rows.append(
            {
                "word": c.word,
                "word_length": c.word_length,
                "length": translation_length(c.element),
                "eta": float(weights @ etas / weights.sum()) if len(triples) else 0.0,
            }
        )
    skipped = len(enumeration) - len(rows)
    if skipped:
        logger.debug(f"{skipped} of {len(enumeration)} classes are not biproximal")
    frame = pd.DataFrame(rows, columns=["word", "word_length", "length", "eta"])
    return frame.sort_values(["length", "word"], kind="stable").reset_index(drop=True)


def orbit_entropy(
    generators: Sequence[GroupElement],
    max_len: int,
    presentation: Optional[Presentation] = None,
    threads: int = 1,
    spectrum: Optional[pd.DataFrame] = None,
) -> EntropyEstimate:
    """Exponential growth rate of the number of closed orbits of length at most ``T``.

    The count ``P_T`` is saturated only for cutoffs below the shortest orbit
    found among the two longest word lengths (both parities of the
    presentation); beyond it, orbits of longer words are missing. Inside that
    range ``log(P_T T)`` is fitted against ``T`` on the upper half of the
    cutoffs.

    Parameters
    ----------
    generators : Sequence[GroupElement]
        The generators.
    max_len : int
        The maximal word length.
    presentation : Optional[Presentation]
        The presentation, free by default.
    threads : int
        Worker threads for the enumeration.
    spectrum : Optional[pd.DataFrame]
        A length spectrum computed earlier with the same ``max_len``.

    Returns
    -------
    EntropyEstimate
        Method ``orbit_counting``, with the cutoff grid and the counts.

    Raises
    ------
    SpectrumTooSmallError
        If fewer than 50 biproximal classes are found.

    """
    if spectrum is None:
        spectrum = orbital_length_spectrum(generators, max_len, presentation, threads)
    if len(spectrum) < const.MIN_SPECTRUM_SIZE:
        msg = f"Only {len(spectrum)} biproximal classes up to length {max_len}, need {const.MIN_SPECTRUM_SIZE}"
        raise SpectrumTooSmallError(msg, {"classes": len(spectrum), "max_len": max_len})

    lengths = spectrum["length"].to_numpy()
    longest_words = spectrum.loc[spectrum["word_length"] >= max_len - 1, "length"]
    t_min = float(lengths[0])
    t_cover = float(longest_words.min()) if len(longest_words) else float(lengths[-1])
    if t_cover <= t_min:
        t_cover = float(lengths[-1])

    cutoffs = np.linspace(t_min, t_cover, COUNT_GRID)
    counts = np.searchsorted(lengths, cutoffs, side="right").astype(float)
    upper = cutoffs >= 0.5 * (t_min + t_cover)
    third = cutoffs >= t_min + 2 * (t_cover - t_min) / 3

    fit = stats.linregress(cutoffs[upper], np.log(counts[upper] * cutoffs[upper]))
    short = stats.linregress(cutoffs[third], np.log(counts[third] * cutoffs[third]))
    fit_stderr = float(np.hypot(fit.stderr, fit.slope - short.slope))
    if len(spectrum) < 4 * const.MIN_SPECTRUM_SIZE:
        logger.warning(f"Orbit entropy from a small spectrum ({len(spectrum)} classes)")

    logger.info(f"Orbit entropy {fit.slope:.4f} ± {fit_stderr:.4f} over T in [{cutoffs[upper][0]:.3f}, {t_cover:.3f}]")
    return EntropyEstimate(
        value=float(fit.slope),
        method="orbit_counting",
        fit_stderr=fit_stderr,
        grid=cutoffs.tolist(),
        counts=counts.tolist(),
        window=[float(cutoffs[upper][0]), t_cover],
        orientation=ORIENTATION,
    )


def ruelle_bound(n: int, eta_samples: Sequence[float]) -> float:
    """Upper bound ``(n - 1) + mean(η)`` on the entropy from transport exponents.

    An empty sample gives ``n - 1``.
    """
    if n < 2:
        msg = f"Dimension must be at least 2, got {n}"
        raise InvalidParameterError(msg)
    if len(eta_samples) == 0:
        logger.warning("No transport exponents given; bound falls back to n - 1")
        return float(n - 1)
    return float((n - 1) + np.mean(eta_samples))


def chi_plus_lower_bound(beta: float) -> float:
    """Lower bound ``2/β`` on positive exponents over a β-convex boundary."""
    if beta <= 0:
        msg = f"Convexity exponent must be positive, got {beta}"
        raise InvalidParameterError(msg)
    return 2.0 / beta
