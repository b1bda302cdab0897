import numpy as np
import pytest

from oracles import embed_indices, full_hamiltonian
from spinent.basis import build_basis, sector_values
from spinent.hamiltonian import (
    FAMILY_SPIN,
    ModelSpec,
    SectorWorkspace,
    apply,
    assemble,
    bond_stencils,
    model_for,
    spin_matrices,
)
from spinent.lattice import chain_lattice


def _sector_matrix(model, n, sz):
    basis = build_basis(n, model.spin, sz)
    return assemble(model, chain_lattice(n), basis).matrix.toarray()


def test_two_spin_singlet_block():
    mat = _sector_matrix(ModelSpec("xxz_half", delta=1.0), 2, 0.0)
    assert mat.shape == (2, 2)
    np.testing.assert_allclose(np.linalg.eigvalsh(mat), [-0.75, 0.25], atol=1e-14)


@pytest.mark.parametrize("delta", [-0.7, 0.0, 1.0, 2.5])
def test_two_spin_polarized_block(delta):
    mat = _sector_matrix(ModelSpec("xxz_half", delta=delta), 2, 1.0)
    np.testing.assert_allclose(mat, [[delta / 4.0]], atol=1e-15)


def test_two_spin_one_exchange_multiplets():
    """Single blbq bond: eigenvalues cos(t)*x + sin(t)*x^2 for x in {-2,-1,1}.

    x is the eigenvalue of S_i.S_j on the two-spin-1 multiplets with total
    spin 0, 1, 2 and multiplicities 1, 3, 5.
    """
    theta = 0.9
    model = ModelSpec("blbq", theta=theta)
    merged = []
    for sz in sector_values("one", 2):
        merged.extend(np.linalg.eigvalsh(_sector_matrix(model, 2, sz)))
    merged.sort()
    def level(x):
        return np.cos(theta) * x + np.sin(theta) * x * x

    expected = sorted([level(-2.0)] + [level(-1.0)] * 3 + [level(1.0)] * 5)
    np.testing.assert_allclose(merged, expected, atol=1e-12)


def test_blbq_is_rescaled_xxz_one():
    """blbq(theta) = cos(theta) * xxz_one(delta=1, beta=-tan(theta))."""
    theta = 0.3
    n = 4
    blbq = ModelSpec("blbq", theta=theta)
    xxz = ModelSpec("xxz_one", delta=1.0, beta=-np.tan(theta))
    for sz in sector_values("one", n):
        a = np.linalg.eigvalsh(_sector_matrix(blbq, n, sz))
        b = np.linalg.eigvalsh(_sector_matrix(xxz, n, sz)) * np.cos(theta)
        np.testing.assert_allclose(a, b, atol=1e-12)


@pytest.mark.parametrize(
    "family,n,kwargs",
    [
        ("xxz_half", 5, dict(delta=0.7)),
        ("xxz_half", 4, dict(delta=-0.3)),
        ("xxz_one", 3, dict(delta=1.2, beta=0.4)),
        ("blbq", 3, dict(theta=2.0)),
    ],
)
def test_sector_blocks_match_kronecker_oracle(family, n, kwargs):
    """Every sector block equals the corresponding slice of the dense
    full-space Hamiltonian built independently from Kronecker products."""
    lattice = chain_lattice(n)
    full = full_hamiltonian(family, n, lattice.bonds, **kwargs)
    model = ModelSpec(family, **kwargs)
    spin = FAMILY_SPIN[family]
    all_rows = []
    for sz in sector_values(spin, n):
        basis = build_basis(n, spin, sz)
        rows = embed_indices([basis.site_digits(s) for s in range(n)], basis.local_dim)
        all_rows.extend(rows.tolist())
        block = full[np.ix_(rows, rows)]
        ours = assemble(model, lattice, basis).matrix.toarray()
        np.testing.assert_allclose(ours, block, atol=1e-13)
    # sectors tile the full space, so the blocks cover every matrix element
    assert sorted(all_rows) == list(range(full.shape[0]))


def test_full_space_hamiltonian_is_block_diagonal():
    lattice = chain_lattice(4)
    full = full_hamiltonian("xxz_half", 4, lattice.bonds, delta=0.6)
    basis = build_basis(4, "half", 0.0)
    rows = embed_indices([basis.site_digits(s) for s in range(4)], 2)
    outside = np.setdiff1d(np.arange(16), rows)
    assert np.linalg.norm(full[np.ix_(rows, outside)]) == 0.0


def test_matrix_symmetry_and_zero_action():
    ham = assemble(
        ModelSpec("xxz_one", delta=0.8, beta=0.2),
        chain_lattice(5),
        build_basis(5, "one", 1.0),
    )
    rng = np.random.default_rng(7)
    v = rng.standard_normal(ham.dimension)
    w = rng.standard_normal(ham.dimension)
    assert abs(v @ apply(ham, w) - apply(ham, v) @ w) < 1e-12
    assert np.all(apply(ham, np.zeros(ham.dimension)) == 0.0)


def test_csr_columns_match_matrix_action():
    ham = assemble(
        ModelSpec("xxz_half", delta=1.3), chain_lattice(6), build_basis(6, "half", 0.0)
    )
    dense = np.zeros((ham.dimension, ham.dimension))
    for row in range(ham.dimension):
        lo, hi = ham.row_offsets[row], ham.row_offsets[row + 1]
        dense[row, ham.column_indices[lo:hi]] = ham.values[lo:hi]
    for k in (0, 3, ham.dimension - 1):
        unit = np.zeros(ham.dimension)
        unit[k] = 1.0
        np.testing.assert_allclose(apply(ham, unit), dense[:, k], atol=1e-15)


def test_su2_point_sector_nesting():
    """At delta=1 every Sz-sector spectrum is contained one sector down."""
    n = 6
    model = ModelSpec("xxz_half", delta=1.0)
    for upper_sz in (1.0, 2.0, 3.0):
        upper = np.linalg.eigvalsh(_sector_matrix(model, n, upper_sz))
        lower = np.linalg.eigvalsh(_sector_matrix(model, n, upper_sz - 1.0))
        for value in upper:
            assert np.min(np.abs(lower - value)) < 1e-10


def test_workspace_caches_and_reuses_parts():
    ws = SectorWorkspace("xxz_half", chain_lattice(6))
    first = ws.matrix(ModelSpec("xxz_half", delta=0.5), 0.0)
    second = ws.matrix(ModelSpec("xxz_half", delta=2.0), 0.0)
    direct = assemble(
        ModelSpec("xxz_half", delta=2.0), chain_lattice(6), build_basis(6, "half", 0.0)
    )
    assert (second.matrix - direct.matrix).nnz == 0
    assert first.matrix.shape == second.matrix.shape
    assert ws.basis(0.0) is ws.basis(0.0)


def test_spin_matrices_algebra():
    for spin in ("half", "one"):
        sz, sp, sm = spin_matrices(spin)
        np.testing.assert_allclose(sp @ sm - sm @ sp, 2.0 * sz, atol=1e-14)
        np.testing.assert_allclose(sz @ sp - sp @ sz, sp, atol=1e-14)


def test_stencils_conserve_pair_sz():
    for family in FAMILY_SPIN:
        parts = bond_stencils(family)
        d = 2 if FAMILY_SPIN[family] == "half" else 3
        pair_sz = np.add.outer(np.arange(d), np.arange(d)).ravel()
        for stencil in parts.values():
            out, inp = np.nonzero(np.abs(stencil) > 1e-14)
            assert np.all(pair_sz[out] == pair_sz[inp])


def test_model_spec_validation_and_coefficients():
    with pytest.raises(ValueError):
        ModelSpec("xyz_chain")
    assert ModelSpec("xxz_half", delta=2.0).part_coefficients() == {"xy": 1.0, "zz": 2.0}
    coeffs = ModelSpec("blbq", theta=np.pi / 2).part_coefficients()
    assert abs(coeffs["bl"]) < 1e-15 and abs(coeffs["bq"] - 1.0) < 1e-15
    assert ModelSpec("xxz_one", beta=0.4).part_coefficients()["bq"] == -0.4


def test_model_for_routes_the_swept_parameter():
    assert model_for("blbq", 1.5).theta == 1.5
    assert model_for("xxz_half", -0.2).delta == -0.2
    one = model_for("xxz_one", 1.1, beta=0.3)
    assert (one.delta, one.beta) == (1.1, 0.3)
    reswept = one.replace_sweep_parameter(1.7)
    assert (reswept.delta, reswept.beta) == (1.7, 0.3)


def test_assemble_rejects_mismatched_inputs():
    with pytest.raises(ValueError):
        assemble(ModelSpec("blbq"), chain_lattice(4), build_basis(4, "half", 0.0))
    with pytest.raises(ValueError):
        assemble(
            ModelSpec("xxz_half"), chain_lattice(6), build_basis(4, "half", 0.0)
        )
    with pytest.raises(ValueError):
        SectorWorkspace("not_a_family", chain_lattice(4))


def test_apply_rejects_wrong_shape():
    ham = assemble(
        ModelSpec("xxz_half", delta=1.0), chain_lattice(4), build_basis(4, "half", 0.0)
    )
    with pytest.raises(ValueError):
        apply(ham, np.zeros(ham.dimension + 1))
