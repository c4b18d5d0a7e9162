"""Physics of the link, one module per stage.

``dipole_optics`` and ``cavity`` describe the two photon interfaces,
``collection`` turns them into efficiencies, ``mirror_opt`` optimises and
sweeps cavity designs, ``entangle`` turns efficiencies into entanglement
rates and ``fidelity`` keeps the infidelity budget.
"""
