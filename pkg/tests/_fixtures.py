"""Shared fixture models and reference values.

The numeric constants below were produced by a separate high-precision
implementation (40-digit arithmetic, independent series/quadrature code)
and are frozen here as regression oracles. Do not regenerate them with
the library under test.
"""
import math

import numpy as np

from expolevy import JumpTerm, LevyModel

# name -> (model, q)
FIXTURES = {
    "kou": (LevyModel(0.3, 0.05,
                      (JumpTerm(3.0, (2.0,)),),
                      (JumpTerm(2.1, (1.5,)),)), 2.2),
    "drift_pos": (LevyModel(0.0, 1.0,
                            (JumpTerm(3.2, (1.1,)),),
                            (JumpTerm(1.6, (0.7,)),)), 3.5),
    "drift_neg": (LevyModel(0.0, -1.0,
                            (JumpTerm(3.2, (2.2,)),),
                            (JumpTerm(1.6, (0.7,)),)), 0.7),
    "pure_jump": (LevyModel(0.0, 0.0,
                            (JumpTerm(2.5, (0.3,)),),
                            (JumpTerm(1.7, (0.255,)),)), 0.8),
    "mult2": (LevyModel(0.6, -0.2,
                        (JumpTerm(3.0, (0.5, 0.25)),),
                        (JumpTerm(1.9, (0.8,)),)), 1.7),
    "cpair": (LevyModel(0.5, 0.0,
                        (JumpTerm(3 + 1.5j, (1 + 0.3j,)),
                         JumpTerm(3 - 1.5j, (1 - 0.3j,)),
                         JumpTerm(2.6, (1.5,))),
                        (JumpTerm(2.3, (1.1,)),)), 3.8),
}

# Brownian motion with drift -1, sigma^2 = 2, unkilled: 1/I is Gamma(2)
# distributed, so M(s) = Gamma(2 - s) and p(x) = x^{-2} exp(-1/x).
DUFRESNE = (LevyModel(math.sqrt(2.0), -1.0, (), ()), 0.0)

ROOTS = {
    "kou": ((2.306938012335649088032652, 8.645315868159446969430135),
            (1.617833442562332073344254, 9.545531549043875327965286)),
    "drift_pos": ((2.512054628479217948952694, 4.842361481573625172542781),
                  (1.473166110052843076045720,)),
    "drift_neg": ((2.695076962959875158029,),
                  (0.5645608354947088871595, 2.355516127465166102948)),
    "pure_jump": ((2.201385154488410663995,), (1.443441229254765743419,)),
    "mult2": ((2.410173933052815219733, 3.323993847385408277346,
               4.267550481790170721097),
              (1.388453499190640221960, 3.402153651926642652370)),
    "cpair": ((2.200415935518627118989,
               2.852620085043324096033 - 1.358952071200748142059j,
               2.852620085043324096033 + 1.358952071200748142059j,
               6.976077752941001860032),
              (2.039830931362398081235, 6.541902927183878823398)),
}

MELLIN = {
    "kou": {0.5: 2.638162726159141145019868,
            1.5: 0.6084943059599110999606937,
            0.8 + 0.6j: 0.5617310175760941093124744
            - 0.7684516519525039224398991j,
            2.0: 0.4994801876695144050351196,
            3.0: 1.068294022216444325603853},
    "drift_pos": {2.0: 0.3980861244019138783064803},
    "drift_neg": {0.5: 1.760865945812735858400938,
                  2.0: 0.6427688504326329019240122,
                  3.0: 0.7152914564319871307227656},
    "pure_jump": {2.0: 1.2893982808022921793157,
                  3.0: 6.429614068690674218832844},
    "mult2": {1.25: 0.7803407614762846779048321,
              2.0: 0.5723656133958253323387816},
    "cpair": {0.5: 3.436758794865230233172872,
              2.0: 0.3040730019276601279489969,
              3.0: 0.4605786236972260902277483},
}

DENSITY = {
    "kou": {2.0: 0.03185977706559909171696644,
            8.0: 0.0002940796154733873535626630,
            40.0: 0.000001375376510687944389182089},
    "drift_pos": {0.5: 0.5578550346684870285358870,
                  0.9: 0.1872399380291613659458195,
                  1.25: 0.08637212810172020298675230,
                  5.0: 0.001203891410884074390647928},
    "drift_neg": {0.5: 0.9254629655216745053850158,
                  0.9: 0.8433076623571362956424555,
                  1.25: 0.1645334843668506411289525,
                  5.0: 0.0006432175049347160520326736},
    "pure_jump": {0.3: 0.6431686612079883375132699,
                  1.2: 0.3067200671614186329037803},
    "mult2": {3.0: 0.01107183381985654751330789},
    "cpair": {2.0: 0.01075789544311462503246325},
}

# Dense sampling around the drift breakpoint x = 1/|mu|. drift_neg has a
# |x - 1|^0.825 branch there; drift_pos is smooth through it.
DENSITY_NEAR_BP = {
    "drift_neg": {0.97: 0.7383602774971249019004398,
                  0.995: 0.6597740859984014068576044,
                  0.999: 0.6357379601867554970114990,
                  0.9995: 0.6313123993087070966666674,
                  1.0: 0.6248150619099409216414038,
                  1.0005: 0.6166517738147740279986780,
                  1.001: 0.6109503012199298608571590,
                  1.002: 0.6014537342144549515159812,
                  1.0025: 0.5972376065018247192631041,
                  1.03: 0.4684639309849737174768849},
    "drift_pos": {0.997: 0.1489683201675337586682213,
                  1.0: 0.1479463500829769011126416,
                  1.003: 0.1469329924205233899374222},
}

CDF = {
    "kou": {0.5: 0.6747676753433501741531193,
            2.0: 0.9728130517602134951198873,
            10.0: 0.9994053622626180292138226},
    "drift_pos": {2.0: 0.9785749977483399660009234},
    "drift_neg": {2.0: 0.9846386135896130725380276},
    "pure_jump": {2.0: 0.8052764388726562103748735},
    "mult2": {2.0: 0.9645285621720327273550379},
    "cpair": {2.0: 0.9911389758175224725233951},
}

ASIAN_PRICE = {"kou": {1.0: 0.09843884181980788}}

# Grids where both the series and the inversion route are healthy. The two
# drift fixtures skip a band around x = 1/|mu| where the series boundary
# makes the comparison ill-conditioned.
GRID50 = {
    "kou": np.geomspace(1.6, 400, 50),
    "drift_pos": np.concatenate([np.geomspace(0.002, 0.88, 25),
                                 np.geomspace(1.25, 600, 25)]),
    "drift_neg": np.concatenate([np.geomspace(0.002, 0.90, 25),
                                 np.geomspace(1.12, 30, 25)]),
    "pure_jump": np.geomspace(0.002, 1.9, 50),
    "mult2": np.geomspace(4.0, 400, 50),
    "cpair": np.geomspace(0.7, 300, 50),
}

CASES = ("sigma_pos", "drift_pos", "drift_neg", "pure_jump")


def _terms(rng, n):
    rhos = []
    while len(rhos) < n:
        r = rng.uniform(0.8, 6.0)
        if all(abs(r - other) > 0.3 for other in rhos):
            rhos.append(r)
    return tuple(JumpTerm(r, (rng.uniform(0.1, 2.5),)) for r in rhos)


def random_model(case: str, rng: np.random.Generator):
    """Random model of the given sigma/mu sign case with a valid jump
    density (single positive-coefficient exponentials on each side)."""
    sigma = rng.uniform(0.2, 1.5) if case == "sigma_pos" else 0.0
    if case == "drift_pos":
        mu = rng.uniform(0.3, 2.0)
    elif case == "drift_neg":
        mu = -rng.uniform(0.3, 2.0)
    elif case == "sigma_pos":
        mu = rng.uniform(-1.0, 1.0)
    else:
        mu = 0.0
    model = LevyModel(sigma, mu,
                      _terms(rng, rng.integers(1, 3)),
                      _terms(rng, rng.integers(1, 3)))
    q = rng.uniform(0.3, 4.0)
    return model, q


def model_dict(name: str) -> dict:
    from expolevy import model_to_dict
    return model_to_dict(FIXTURES[name][0])
