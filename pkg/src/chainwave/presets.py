"""Self-contained scenario presets reproducing the published parameter sets.

Each preset is a complete scenario dict (see `chainwave.scenario`); nothing
is inherited at run time.  Precision choices follow the precision guard:
clean non-reciprocal runs use the spectral route at a mantissa wide enough
that rounding noise stays far below every feature the preset is meant to
show, while disordered runs are dominated by their physical disorder and run
in binary64.
"""

from __future__ import annotations

import math

PI = math.pi

PRESETS: dict[str, dict] = {
    "fig1": {
        "description": "N=200 chain, t_l=2, t_r=0.2, delta at 100; snapshot "
                       "of the two wavefronts at t<=60 (plus Hermitian-frame view)",
        "config": {
            "model": {"variant": "hatano_nelson", "n": 200, "t_l": 2.0, "t_r": 0.2},
            "initial": {"kind": "delta", "n0": 100},
            "evolution": {
                "backend": "spectral_transform",
                "precision_bits": 212,
                "times": {"start": 0.0, "stop": 60.0, "step": 1.0},
            },
            "analysis": {"min_jump_sites": 10, "front_threshold_log10": -10.0},
            "output": {"normalization": "max", "include_hermitian_frame": True},
        },
    },
    "fig2": {
        "description": "N=200, t_l=2, t_r=0.2, delta at 100; edge series with "
                       "arrivals t1~45, t2~79, t3~237",
        "config": {
            "model": {"variant": "hatano_nelson", "n": 200, "t_l": 2.0, "t_r": 0.2},
            "initial": {"kind": "delta", "n0": 100},
            "evolution": {
                "backend": "spectral_transform",
                "precision_bits": 212,
                "times": {"start": 0.0, "stop": 260.0, "step": 0.5},
            },
            "analysis": {"edge_site": 1, "min_jump_sites": 10},
            "output": {"normalization": "max"},
        },
    },
    "fig3": {
        "description": "N=400, t_l=2, t_r=1.5, gaussian n0=300 sigma=3 k0=0; "
                       "bulk acceleration and velocity saturation",
        "config": {
            "model": {"variant": "hatano_nelson", "n": 400, "t_l": 2.0, "t_r": 1.5},
            "initial": {"kind": "gaussian", "n0": 300.0, "sigma": 3.0, "k0": 0.0},
            "evolution": {
                "backend": "spectral_transform",
                "precision_bits": 212,
                "times": {"start": 0.0, "stop": 72.0, "step": 0.5},
            },
            "analysis": {"min_jump_sites": 10},
            "output": {"normalization": "max"},
        },
    },
    "fig4": {
        "description": "fig3 with k0=pi/4: wall reflection; lattice position "
                       "jump near t~70 (t_hit~41, continuum ~37)",
        "config": {
            "model": {"variant": "hatano_nelson", "n": 400, "t_l": 2.0, "t_r": 1.5},
            "initial": {"kind": "gaussian", "n0": 300.0, "sigma": 3.0, "k0": PI / 4},
            "evolution": {
                "backend": "spectral_transform",
                "precision_bits": 212,
                "times": {"start": 0.0, "stop": 100.0, "step": 1.0},
            },
            "analysis": {"min_jump_sites": 10, "wall_distance": 100.0},
            "output": {"normalization": "max"},
        },
    },
    "fig5": {
        "description": "Hermitian gaussian vs wall at d=100 (t_l=t_r=sqrt(3)): "
                       "lattice snapshots around t_hit",
        "config": {
            "model": {
                "variant": "hatano_nelson", "n": 400,
                "t_l": 1.7320508075688772, "t_r": 1.7320508075688772,
            },
            "initial": {"kind": "gaussian", "n0": 300.0, "sigma": 3.0, "k0": PI / 4},
            "evolution": {
                "backend": "spectral_transform",
                "precision_bits": 53,
                "times": [30.8, 40.8, 50.8],
            },
            "analysis": {"min_jump_sites": 10, "wall_distance": 100.0},
            "output": {"normalization": "max"},
        },
    },
    "fig6": {
        "description": "N=400, t_l=2, t_r=1.5, gaussian k0=pi/4 with disorder "
                       "w=1e-7: disorder-seeded transition near t~27",
        "config": {
            "model": {
                "variant": "hatano_nelson", "n": 400, "t_l": 2.0, "t_r": 1.5,
                "disorder_w": 1e-7,
            },
            "initial": {"kind": "gaussian", "n0": 300.0, "sigma": 3.0, "k0": PI / 4},
            "evolution": {
                "backend": "precision_stepper",
                "precision_bits": 53,
                "tolerance": 1e-10,
                "times": {"start": 0.0, "stop": 40.0, "step": 1.0},
            },
            "analysis": {"min_jump_sites": 10},
            "output": {"normalization": "max"},
            "seed": 1,
        },
    },
    "fig6-edge": {
        "description": "fig6 model, edge series to t=400 with arrivals "
                       "t1..t4 (x0=300)",
        "config": {
            "model": {
                "variant": "hatano_nelson", "n": 400, "t_l": 2.0, "t_r": 1.5,
                "disorder_w": 1e-7,
            },
            "initial": {"kind": "gaussian", "n0": 300.0, "sigma": 3.0, "k0": PI / 4},
            "evolution": {
                "backend": "precision_stepper",
                "precision_bits": 53,
                "tolerance": 1e-10,
                "times": {"start": 0.0, "stop": 400.0, "step": 1.0},
            },
            "analysis": {"edge_site": 1, "min_jump_sites": 10},
            "output": {"normalization": "max"},
            "seed": 1,
        },
    },
    "fig7-ssh": {
        "description": "dimer chain t1=0.4, t2=1, gamma=0.5, 100 cells (200 "
                       "sites); edge oscillations with period 2L/v_h ~ 640.5",
        "config": {
            "model": {"variant": "nh_ssh", "n": 100, "t1": 0.4, "t2": 1.0, "gamma": 0.5},
            "initial": {"kind": "delta", "n0": 1},
            "evolution": {
                "backend": "spectral_transform",
                "precision_bits": 53,
                "times": {"start": 0.0, "stop": 2100.0, "step": 1.0},
            },
            "analysis": {"edge_site": 1, "min_jump_sites": 10},
            "output": {"normalization": "none"},
        },
    },
    "fig8-ssh-gaussian": {
        "description": "dimer chain, gaussian on the A sublattice (n0=150 "
                       "cells, sigma=3, k0=pi/4), snapshots t=1,50,100",
        "config": {
            "model": {"variant": "nh_ssh", "n": 200, "t1": 0.4, "t2": 1.0, "gamma": 0.5},
            "initial": {
                "kind": "gaussian", "n0": 150.0, "sigma": 3.0, "k0": PI / 4,
                "sublattice": "A",
            },
            "evolution": {
                "backend": "spectral_transform",
                "precision_bits": 53,
                "times": [1.0, 50.0, 100.0],
            },
            "analysis": {"min_jump_sites": 10},
            "output": {"normalization": "max"},
        },
    },
    "appendixA": {
        "description": "Hermitian chain t0=sqrt(3), gaussian n0=200 sigma=3 "
                       "k0=pi/4: saddle-point validation at t=10,30,50",
        "config": {
            "model": {
                "variant": "hatano_nelson", "n": 400,
                "t_l": 1.7320508075688772, "t_r": 1.7320508075688772,
            },
            "initial": {"kind": "gaussian", "n0": 200.0, "sigma": 3.0, "k0": PI / 4},
            "evolution": {
                "backend": "spectral_transform",
                "precision_bits": 212,
                "times": [10.0, 30.0, 50.0],
            },
            "analysis": {"min_jump_sites": 10},
            "output": {"normalization": "none"},
        },
    },
    "appendixD-sigma-sweep": {
        "description": "reflection race at d=50 for sigma=1.5, 2, 2.5 "
                       "(below/above sigma_c,ref)",
        "config": {
            "model": {"variant": "hatano_nelson", "n": 400, "t_l": 2.0, "t_r": 1.5},
            "initial": {"kind": "gaussian", "n0": 350.0, "sigma": 2.0, "k0": PI / 4},
            "evolution": {
                "backend": "spectral_transform",
                "precision_bits": 212,
                "times": {"start": 0.0, "stop": 90.0, "step": 1.0},
            },
            "analysis": {"min_jump_sites": 10, "wall_distance": 50.0},
            "output": {"normalization": "max"},
            "sweep": {"parameter": "initial.sigma", "values": [1.5, 2.0, 2.5]},
        },
    },
    "appendixE-critical": {
        "description": "disorder w=1e-4: widths below/above sigma_c,dis "
                       "(smooth vs transition)",
        "config": {
            "model": {
                "variant": "hatano_nelson", "n": 400, "t_l": 2.0, "t_r": 1.5,
                "disorder_w": 1e-4,
            },
            "initial": {"kind": "gaussian", "n0": 300.0, "sigma": 1.0, "k0": PI / 4},
            "evolution": {
                "backend": "precision_stepper",
                "precision_bits": 53,
                "tolerance": 1e-10,
                "times": {"start": 0.0, "stop": 40.0, "step": 1.0},
            },
            "analysis": {"min_jump_sites": 10},
            "output": {"normalization": "max"},
            "seed": 1,
            "sweep": {"parameter": "initial.sigma", "values": [1.0, 2.0]},
        },
    },
}


def preset_names() -> list[str]:
    return list(PRESETS.keys())


def preset_description(name: str) -> str:
    return PRESETS[name]["description"]


def preset_config_dict(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    import copy

    return copy.deepcopy(PRESETS[name]["config"])
