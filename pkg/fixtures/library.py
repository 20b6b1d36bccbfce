"""
Built-in gauge systems, stored as .gsys source so they go through the same
parser as user files.

    heisenberg     - R^3 with gauge generator d/dz and P = X ^ Y
    contact        - Jacobi structure of a contact manifold of dimension 2n+1
    triangular     - invertible upper triangular n x n matrices, gauged by
                     the strictly upper triangular left invariant fields
"""
import re
from typing import Callable, Dict, List, Optional

HEISENBERG = """\
# Heisenberg group H3 as R^3 with coordinates (x, y, z)
coords x y z;
vector X = (1, 0, -y/2);
vector Y = (0, 1, x/2);
gauge Z = (0, 0, 1);
bivector P = wedge(X, Y);
dynamics V = (y, -x, 0);
form theta = dz + 1/2*(y*dx - x*dy);
bounds max_res = 3, deg = 3;
check jacobi, projectible, poisson_vector, observable;
"""


def _join(terms: List[str]) -> str:
    return ' + '.join(terms) if terms else '0'


def contact_text(n: int = 1) -> str:
    """Contact manifold with theta = dt - sum p_i dq_i, R = d/dt and P = sum d/dp_i ^ (d/dq_i + p_i d/dt)."""
    if n < 1:
        raise ValueError("A contact fixture needs n >= 1")
    q = [f"q{i}" for i in range(1, n + 1)]
    p = [f"p{i}" for i in range(1, n + 1)]
    bivector = _join([f"wedge(d/d{pi}, d/d{qi} + {pi}*d/dt)" for qi, pi in zip(q, p)])
    dynamics = _join([f"{qi}*d/d{qi} - {pi}*d/d{pi}" for qi, pi in zip(q, p)])
    form = 'dt' + ''.join(f" - {pi}*d{qi}" for qi, pi in zip(q, p))
    return (f"# contact manifold of dimension {2 * n + 1}\n"
            f"coords {' '.join(q + p)} t;\n"
            f"gauge R = d/dt;\n"
            f"bivector P = {bivector};\n"
            f"dynamics V = {dynamics};\n"
            f"form theta = {form};\n"
            f"bounds max_res = 3, deg = 3;\n"
            f"check jacobi, projectible, poisson_vector, observable;\n")


def _left_invariant(n: int, k: int, l: int) -> str:
    """Left invariant field of the matrix unit E_kl: sum_{i <= k} g_ik d/dg_il."""
    return _join([f"g{i}{k}*d/dg{i}{l}" for i in range(1, k + 1)])


def triangular_text(n: int = 3) -> str:
    """T_n with generators E_kl (k < l), P = 1/2 sum_{i<j} e_j ^ e_i and V = sum_k E_kn."""
    if not 2 <= n <= 9:
        raise ValueError("The triangular fixture supports 2 <= n <= 9")
    coords = [f"g{i}{j}" for i in range(1, n + 1) for j in range(i, n + 1)]
    pairs = [(k, l) for k in range(1, n + 1) for l in range(k + 1, n + 1)]
    lines = [f"# invertible upper triangular {n}x{n} matrices", f"coords {' '.join(coords)};"]
    lines += [f"gauge R{k}{l} = {_left_invariant(n, k, l)};" for k, l in pairs]
    lines += [f"vector e{i} = {_left_invariant(n, i, i)};" for i in range(1, n + 1)]
    bivector = _join([f"1/2*wedge(e{j}, e{i})" for i in range(1, n + 1) for j in range(i + 1, n + 1)])
    lines.append(f"bivector P = {bivector};")
    lines.append(f"dynamics V = {_join([_left_invariant(n, k, n) for k in range(1, n + 1)])};")
    for a, (k, l) in enumerate(pairs):
        for m, nn in pairs[a + 1:]:
            # [E_kl, E_mn] = delta_lm E_kn - delta_nk E_ml
            if l == m:
                lines.append(f"structure (R{k}{l}, R{m}{nn}) = R{k}{nn}: 1;")
            elif nn == k:
                lines.append(f"structure (R{k}{l}, R{m}{nn}) = R{m}{l}: -1;")
    lines.append("bounds max_res = 3, deg = 2;")
    lines.append("check witnesses, jacobi, projectible, poisson_vector;")
    return '\n'.join(lines) + '\n'


FIXTURES: Dict[str, Callable[[int], str]] = {
    'heisenberg': lambda n: HEISENBERG,
    'contact': contact_text,
    'triangular': triangular_text,
}

DEFAULT_N = {'heisenberg': 1, 'contact': 1, 'triangular': 3}

_NAME_RE = re.compile(r"^(heisenberg|contact|triangular)(?:-(\d+|n))?$")


def fixture_names() -> List[str]:
    return sorted(FIXTURES)


def fixture_text(name: str, n: Optional[int] = None) -> str:
    """Source of a fixture; 'contact-2' and 'triangular-3' carry n in the name, 'triangular-n' takes --n."""
    match = _NAME_RE.match(name)
    if match is None:
        raise KeyError(f"Unknown fixture {name!r}; choose from {', '.join(fixture_names())}")
    base, suffix = match.groups()
    if suffix and suffix != 'n':
        n = int(suffix)
    return FIXTURES[base](n if n is not None else DEFAULT_N[base])
