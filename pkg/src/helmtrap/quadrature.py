"""Quadrature rules on [0, 1]: Gauss-Legendre and log-weighted Gauss.

The log rules integrate f against the weight -log(x) on [0, 1]; they are
exact for polynomials f up to degree 2n-1.  Nodes and weights were generated
offline from the exact moments 1/(j+1)^2 via the Chebyshev algorithm at
80-digit precision and are frozen here (max moment defect < 5e-16).
"""

from functools import lru_cache

import numpy as np

__all__ = ["gauss01", "log_gauss01"]


@lru_cache(maxsize=None)
def gauss01(n: int):
    """Gauss-Legendre nodes/weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


_LOG_GAUSS_TABLE = {
    4: (
        (0.041448480199384075,
         0.24527491432060256,
         0.5561654535602762,
         0.8489823945329852),
        (0.38346406814513695,
         0.3868753177747607,
         0.19043512695014242,
         0.03922548712995977),
    ),
    6: (
        (0.021634005844117676,
         0.12958339115495077,
         0.3140204499147655,
         0.5386572173518022,
         0.7569153373774028,
         0.9226688513721203),
        (0.23876366257854761,
         0.30828657327394726,
         0.24531742656320965,
         0.14200875656647682,
         0.05545462232488646,
         0.010168958692932254),
    ),
    8: (
        (0.01332024416089247,
         0.07975042901389477,
         0.19787102932618786,
         0.3541539943519091,
         0.5294585752349172,
         0.7018145299390997,
         0.8493793204411061,
         0.9533264500563589),
        (0.16441660472800265,
         0.23752561002330538,
         0.22684198443191964,
         0.17575407900607012,
         0.1129240302467593,
         0.057872210717782244,
         0.020979073742132703,
         0.0036864071040276464),
    ),
    10: (
        (0.009042630962199654,
         0.053971266222500675,
         0.13531182463925062,
         0.24705241628715977,
         0.38021253960933193,
         0.5237923179718434,
         0.6657752055164241,
         0.7941904160119658,
         0.8981610912190029,
         0.9688479887186333),
        (0.1209551319545703,
         0.1863635425640729,
         0.1956608732777603,
         0.17357714218290574,
         0.1356956729954837,
         0.09364675853811064,
         0.055787727351416114,
         0.027159810899233732,
         0.009515182602848463,
         0.0016381576335981955),
    ),
    12: (
        (0.00654872227908021,
         0.038946809560449824,
         0.09815026310600639,
         0.18113858159063156,
         0.2832200676673725,
         0.3984344351634367,
         0.5199526267923529,
         0.6405109167161063,
         0.7528650120518305,
         0.850240024162302,
         0.926749683223914,
         0.9777561296899975),
        (0.09319269144392661,
         0.1497518275763245,
         0.16655745436459637,
         0.15963355943698876,
         0.13842483186483462,
         0.11001657063572047,
         0.07996182177082939,
         0.0524069548246418,
         0.030071088873761052,
         0.01424924558799825,
         0.004899924582321744,
         0.000834029038056902),
    ),
    16: (
        (0.0038978344871159233,
         0.023028945616873193,
         0.05828039830624038,
         0.10867836509105397,
         0.17260945490984375,
         0.2479370544705787,
         0.3320945491299172,
         0.4221839105819486,
         0.5150824733814624,
         0.6075561204477286,
         0.6963756532282138,
         0.7784325658732656,
         0.850850269715391,
         0.9110868572222717,
         0.9570255717035417,
         0.9870478002479842),
        (0.060791710043591726,
         0.10291567751758218,
         0.12235566204600913,
         0.12756924693701638,
         0.12301357460007015,
         0.1118472448554857,
         0.09659638515212395,
         0.07935666435147311,
         0.06185049458196536,
         0.0454352465077268,
         0.03109897475158197,
         0.019459765927361008,
         0.010776254963205561,
         0.0049725428900875435,
         0.0016782011100512134,
         0.0002823537646684531),
    ),
    20: (
        (0.0025883279559219484,
         0.015209662349560232,
         0.03853655037216524,
         0.07218161381587389,
         0.11546052648763303,
         0.16744285627532957,
         0.2269837872602026,
         0.29275496094154596,
         0.3632774298578589,
         0.43695714009076814,
         0.5121225946789673,
         0.5870640449144099,
         0.6600734133149093,
         0.7294840839296877,
         0.7937096719870856,
         0.8512808927891258,
         0.900879680854417,
         0.9413697491290915,
         0.9718227410752626,
         0.9915380814387114),
        (0.043142752133208166,
         0.07538370990858977,
         0.09305326745166302,
         0.10145671184983025,
         0.10320176205607202,
         0.10002254980527332,
         0.09325979930029657,
         0.08402895287194032,
         0.0732855891300309,
         0.06185033691373041,
         0.05041660443837497,
         0.03955137000529813,
         0.02969407789581255,
         0.021156315355427332,
         0.01412373293896439,
         0.008660974504335466,
         0.0047199401462036,
         0.0021513974039652117,
         0.0007197282146532175,
         0.00012042767633021777),
    ),
    24: (
        (0.0018453608220343476,
         0.010796162815990384,
         0.027357452961246365,
         0.0513535912994052,
         0.08245087302172072,
         0.12018574140382232,
         0.16397890448999153,
         0.21314756641797317,
         0.2669179647430362,
         0.3244387657079151,
         0.3847954028452597,
         0.44702526657212616,
         0.5101335701062177,
         0.5731096736695283,
         0.6349436248309259,
         0.6946426601445475,
         0.7512474085095803,
         0.8038475381949679,
         0.8515965961961266,
         0.8937257995030761,
         0.9295565508111644,
         0.9585114574081335,
         0.9801235741973818,
         0.994042814504939),
        (0.032388233873294356,
         0.05782656371581092,
         0.07313632868652024,
         0.0819856157321442,
         0.08610503133383733,
         0.08659110303137268,
         0.08425853833134456,
         0.0797701344249896,
         0.073692502565397,
         0.06652154048118242,
         0.058694018053608514,
         0.05059239266845316,
         0.04254632303669314,
         0.03483272708678574,
         0.0276754330113904,
         0.021245046769959967,
         0.01565941282265356,
         0.010984890711271176,
         0.007238566384533983,
         0.0043914426594726455,
         0.002372596773482051,
         0.001074248627724441,
         0.00035764789614588856,
         5.9661321932428466e-05),
    ),
    32: (
        (0.0010756110837922047,
         0.006250810087022607,
         0.01582844084981408,
         0.029763503015650738,
         0.04795207502179679,
         0.07024383508069179,
         0.09644673387230618,
         0.1263301772382889,
         0.15962788537705833,
         0.1960407756731627,
         0.23523999143204571,
         0.27687011748197143,
         0.32055258833308437,
         0.365889277017391,
         0.4124662429659581,
         0.4598576113661134,
         0.5076295526509711,
         0.555344328286804,
         0.6025643674279366,
         0.648856338084223,
         0.6937951760695029,
         0.7369680350963846,
         0.7779781219045453,
         0.8164483812191652,
         0.8520249965975074,
         0.8843806747877035,
         0.913217683000779,
         0.9382706102208144,
         0.9593088243610784,
         0.9761385919089604,
         0.9886047831996282,
         0.9965916301800245),
        (0.02038902353154664,
         0.037441676436663,
         0.04879551120357918,
         0.05652398407509894,
         0.06156760171990677,
         0.06448943356574224,
         0.06568343028833507,
         0.06545403708436401,
         0.06405254161395708,
         0.06169550988558162,
         0.05857473633393543,
         0.05486278410751166,
         0.05071608278942946,
         0.046276616905610135,
         0.041672786211189014,
         0.037019783226277296,
         0.03241970322894128,
         0.027961525965011315,
         0.023721061881064442,
         0.01976092596118259,
         0.01613058237539264,
         0.012866489279676182,
         0.009992363018151859,
         0.007519573343586662,
         0.0054476752873994245,
         0.003765078475839588,
         0.0024498506918606655,
         0.0014706491242252229,
         0.0007877699015661392,
         0.00035430410473815733,
         0.00011738647347100987,
         1.952190916544817e-05),
    ),
}


@lru_cache(maxsize=None)
def log_gauss01(n: int):
    """Nodes/weights for integral_0^1 f(x) (-log x) dx ~ sum w_i f(x_i)."""
    try:
        x, w = _LOG_GAUSS_TABLE[n]
    except KeyError:
        raise ValueError(
            f"no log-Gauss rule of order {n}; available: {sorted(_LOG_GAUSS_TABLE)}"
        ) from None
    return np.asarray(x), np.asarray(w)
