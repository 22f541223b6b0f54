import random
from fractions import Fraction as Q

import pytest

from gbsn.gog import Edge, GoGSpec, presentation
from gbsn.holonomy import compute_holonomy, non_discreteness_witness, word_image
from gbsn.linalg import QMat, ZMat
from gbsn.words import Word, parse_word

H = QMat([[2, 0], [0, Q(1, 2)]])
P = QMat([[1, 1], [0, 1]])
E = QMat([[0, 1], [-1, 0]])


class TestComputeHolonomy:
    def test_two_loop_matrices(self, spec_a):
        hd = compute_holonomy(spec_a)
        assert hd.stable == {"h": H, "p": P}

    def test_three_loop_matrices(self, spec_b):
        hd = compute_holonomy(spec_b)
        assert hd.stable == {"h": H, "p": P, "e": E}

    def test_vertex_letters_to_identity(self, spec_a):
        hd = compute_holonomy(spec_a)
        assert word_image(hd, parse_word("a")) == QMat.identity(2)
        assert word_image(hd, parse_word("a^3 b^-2")) == QMat.identity(2)

    def test_flipping_an_edge_inverts_its_matrix(self, spec_a):
        flipped = GoGSpec.make(
            spec_a.rank,
            spec_a.vertices,
            [spec_a.edges[0].flipped(), spec_a.edges[1]],
            spec_a.spanning_tree,
        )
        hd = compute_holonomy(flipped)
        assert hd.stable["h"] == H.inverse()

    def test_tree_transport(self):
        # two vertices: the tree edge identifies Y-coordinates with doubled
        # X-coordinates, so the loop at Y transports to a conjugated matrix
        spec = GoGSpec.make(
            1,
            ["X", "Y"],
            [
                Edge("f", "X", "Y", ZMat([[2]]), ZMat([[1]])),
                Edge("t", "Y", "Y", ZMat([[1]]), ZMat([[3]])),
            ],
        )
        hd = compute_holonomy(spec)
        # rank 1 is commutative, so transport cannot change the value
        assert hd.stable["t"] == QMat([[3]])
        assert hd.base_vertex == "X"


class TestWordImage:
    def test_conjugated_shear_powers(self, spec_a):
        hd = compute_holonomy(spec_a)
        for k in range(-5, 6):
            w = parse_word(f"h^{k} p h^{-k}")
            assert word_image(hd, w) == QMat([[1, Q(4) ** k], [0, 1]])

    def test_empty_word(self, spec_a):
        assert word_image(compute_holonomy(spec_a), Word()) == QMat.identity(2)

    def test_homomorphism_random(self, spec_b):
        hd = compute_holonomy(spec_b)
        rng = random.Random(9)
        letters = ["a", "b", "h", "p", "e"]
        for _ in range(60):
            u = Word((rng.choice(letters), rng.choice([-2, -1, 1, 2])) for _ in range(rng.randint(0, 6)))
            v = Word((rng.choice(letters), rng.choice([-2, -1, 1, 2])) for _ in range(rng.randint(0, 6)))
            assert word_image(hd, u * v) == word_image(hd, u) * word_image(hd, v)

    def test_relators_map_to_identity(self, spec_a, spec_b):
        for spec in (spec_a, spec_b):
            hd = compute_holonomy(spec)
            for relator in presentation(spec).relators:
                assert word_image(hd, relator) == QMat.identity(2)

    def test_unknown_letter(self, spec_a):
        with pytest.raises(KeyError):
            word_image(compute_holonomy(spec_a), Word([("z", 1)]))


class TestNonDiscretenessWitness:
    def test_two_loop_witness(self, spec_a):
        hd = compute_holonomy(spec_a)
        res = non_discreteness_witness(hd, Q(1, 1000), 11)
        assert res.kind == "witness"
        assert res.word == parse_word("h^-5 p h^5")
        assert res.image == QMat([[1, Q(1, 1024)], [0, 1]])
        # the bound is sharp: nothing within 1/1000 of the identity exists
        # among stable-letter words of length <= 10
        assert non_discreteness_witness(hd, Q(1, 1000), 10).kind == "none found"

    def test_integral_shortcut(self):
        spec = GoGSpec.make(
            2,
            ["X"],
            [
                Edge("p", "X", "X", ZMat.identity(2), ZMat([[1, 1], [0, 1]])),
                Edge("e", "X", "X", ZMat.identity(2), ZMat([[0, 1], [-1, 0]])),
            ],
        )
        res = non_discreteness_witness(compute_holonomy(spec), Q(1, 1000), 8)
        assert res.kind == "discrete (integral)"

    def test_diagonal_alone_finds_nothing(self):
        spec = GoGSpec.make(
            2,
            ["X"],
            [Edge("h", "X", "X", ZMat([[1, 0], [0, 2]]), ZMat([[2, 0], [0, 1]]))],
        )
        res = non_discreteness_witness(compute_holonomy(spec), Q(1, 1000), 9)
        assert res.kind == "none found"
        assert res.searched_length == 9

    def test_epsilon_must_be_positive(self, spec_a):
        with pytest.raises(ValueError):
            non_discreteness_witness(compute_holonomy(spec_a), 0)
