"""Mechanical verification of the 13-ray state-independent Kochen-Specker proof.

Submodules:

* :mod:`kscube.hilbert`     scalars, rays, projectors, observables, states
* :mod:`kscube.orthograph`  orthogonality graphs, bases, isomorphism
* :mod:`kscube.coloring`    Kochen-Specker value assignments
* :mod:`kscube.bounds`      classical bounds and quantum operators of inequalities
* :mod:`kscube.reconstruct` recovering the standard rays from any realization
* :mod:`kscube.mcsim`       Monte Carlo estimation from simulated measurements
* :mod:`kscube.cli`         the ``kscube`` command
"""

__version__ = "0.1.0"
