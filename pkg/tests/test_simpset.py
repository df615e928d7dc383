import itertools

import pytest

from hallforge.simpset import (
    M,
    CorrGrid,
    DeltaPlusCube,
    DeltaPlusMap,
    SubComplex,
    associativity_cube,
    augmentation,
    bracketing_paths,
    cut_complex,
    grid_complexes,
    spine,
    verify_associativity_cube_unique,
)


def faces_of(*faces):
    return {frozenset(f) for f in faces}


def test_augmentation_counts_and_shape():
    assert augmentation(0) == ((),)
    assert augmentation(1) == ((1,), (0,))
    assert len(augmentation(3)) == 4
    # each cut is monotone 0s-then-1s
    for cut in augmentation(5):
        assert sorted(cut) == list(cut)


def test_cut_complex_identity_is_spine():
    horn = cut_complex(DeltaPlusMap.identity(2))
    assert horn.faces == faces_of([0], [1], [2], [0, 1], [1, 2])
    assert horn.render() == "[0 1] [1 2]"
    s3 = spine(3)
    maximal = s3.maximal_faces()
    assert len(maximal) == 3
    assert all(len(f) == 2 for f in maximal)


def test_cut_complex_surjection_is_full_simplex():
    to_point = DeltaPlusMap(2, 1, (0, 0))
    assert cut_complex(to_point).faces == SubComplex.full_simplex(2).faces
    to_point3 = DeltaPlusMap(3, 1, (0, 0, 0))
    assert cut_complex(to_point3).faces == SubComplex.full_simplex(3).faces


def test_cut_complex_empty_set_is_point():
    empty = DeltaPlusMap(0, 0, ())
    assert cut_complex(empty).faces == faces_of([0])


def test_cut_complex_empty_preimage_gives_vertex():
    # ord{1} -> ord{2} hitting only the top element
    f = DeltaPlusMap(1, 2, (1,))
    assert cut_complex(f).faces == faces_of([0], [1], [0, 1])


def test_cut_complex_downward_closed():
    for f in [DeltaPlusMap(4, 2, (0, 0, 1, 1)), DeltaPlusMap(3, 2, (0, 1, 1))]:
        assert cut_complex(f).is_downward_closed()


def test_composite_contains_pushforward_and_factor():
    f = DeltaPlusMap(3, 2, (0, 0, 1))
    g = DeltaPlusMap(2, 1, (0, 0))
    gf = f.then(g)
    big = cut_complex(gf)
    assert cut_complex(f) <= big
    pushed = cut_complex(g).pushforward(f.cut_embedding(), 3)
    assert pushed <= big


def test_grid_of_single_map():
    f = DeltaPlusMap(2, 1, (0, 0))
    cube = DeltaPlusCube(1, {(0,): 2, (1,): 1}, {((0,), 0): f})
    grid = grid_complexes(cube)
    assert grid.entry((0,)).faces == spine(2).faces
    assert grid.entry((M,)).faces == SubComplex.full_simplex(2).faces
    # the target's spine pushed along the cut embedding: the edge {0, 2}
    assert grid.entry((1,)).faces == faces_of([0], [2], [0, 2])


def test_grid_of_identity_cube_is_spine_everywhere():
    ident = DeltaPlusMap.identity(2)
    cube = DeltaPlusCube(1, {(0,): 2, (1,): 2}, {((0,), 0): ident})
    grid = grid_complexes(cube)
    for coords in [(0,), (M,), (1,)]:
        assert grid.entry(coords).faces == spine(2).faces


def test_grid_of_associativity_square():
    grid = grid_complexes(associativity_cube(3))
    e = grid.entry
    assert e((M, M)).faces == SubComplex.full_simplex(3).faces
    assert e((0, 0)).faces == spine(3).faces
    # axis 0 collapses gap 1 ({1,2}), axis 1 collapses gap 2 ({2,3})
    assert e((M, 0)).faces == SubComplex.make(3, [[0, 1, 2], [2, 3]]).faces
    assert e((1, 0)).faces == SubComplex.make(3, [[0, 2], [2, 3]]).faces
    assert e((0, M)).faces == SubComplex.make(3, [[0, 1], [1, 2, 3]]).faces
    assert e((0, 1)).faces == SubComplex.make(3, [[0, 1], [1, 3]]).faces
    assert e((1, M)).faces == SubComplex.make(3, [[0, 2, 3]]).faces
    assert e((M, 1)).faces == SubComplex.make(3, [[0, 1, 3]]).faces
    assert e((1, 1)).faces == SubComplex.make(3, [[0, 3]]).faces


def test_grid_entries_shrink_when_resolving():
    grid = grid_complexes(associativity_cube(4))
    for coords, cx in grid.entries.items():
        for axis, c in enumerate(coords):
            if c == M:
                for value in (0, 1):
                    resolved = coords[:axis] + (value,) + coords[axis + 1:]
                    assert grid.entries[resolved] <= cx


def test_grid_subsquares_match_face_grids():
    cube = associativity_cube(4)
    grid = grid_complexes(cube)
    for axis in range(3):
        for value in (0, 1):
            face = cube.subcube(axis, value)
            face_grid = grid_complexes(face)
            # push the face grid into the big ambient along the composite
            initial = (0, 0, 0)
            face_initial = tuple(value if i == axis else 0 for i in range(3))
            emb = cube.composite(initial, face_initial).cut_embedding()
            for small_coords, cx in face_grid.entries.items():
                big_coords = small_coords[:axis] + (value,) + small_coords[axis:]
                assert grid.entries[big_coords].faces == cx.pushforward(emb, grid.ambient).faces


def test_associativity_cube_n3():
    cube = associativity_cube(3)
    assert cube.vertex_sizes == {(0, 0): 3, (1, 0): 2, (0, 1): 2, (1, 1): 1}
    assert cube.commutes()
    # both composites equal the unique surjection onto a point
    comp = cube.composite((0, 0), (1, 1))
    assert comp == DeltaPlusMap(3, 1, (0, 0, 0))


def test_associativity_cube_n4_vertices_and_paths():
    cube = associativity_cube(4)
    sizes = sorted(cube.vertex_sizes.values())
    assert sizes == [1, 2, 2, 2, 3, 3, 3, 4]
    paths = bracketing_paths(cube)
    assert len(paths) == 6
    # all path composites agree (the cube commutes)
    comps = {cube.composite((0, 0, 0), (1, 1, 1))}
    assert len(comps) == 1


def test_associativity_cube_contains_all_one_step_surjections():
    for n in (3, 4, 5):
        cube = associativity_cube(n)
        labels = set()
        for (v, axis), f in cube.edges.items():
            gap = next(t + 1 for t in range(f.src - 1) if f.values[t] == f.values[t + 1])
            labels.add((f.src, gap))
        expected = {(j, g) for j in range(2, n + 1) for g in range(1, j)}
        assert labels == expected


def test_associativity_cube_faces_are_lower_associativity_data():
    # the face collapsing gap g everywhere is the associativity cube one level
    # down, after renumbering the remaining gaps
    for n in (4, 5):
        cube = associativity_cube(n)
        lower = associativity_cube(n - 1)
        for g_axis in range(n - 1):
            face = cube.subcube(g_axis, 1)
            assert face.vertex_sizes == lower.vertex_sizes
            assert face.edges == lower.edges
        for g_axis in range(n - 1):
            face0 = cube.subcube(g_axis, 0)
            assert face0.commutes()
            for (v, axis), f in face0.edges.items():
                assert f.src == f.dst + 1 and f.is_surjective()


def test_uniqueness_of_associativity_cubes():
    for n in (3, 4):
        unique, witness = verify_associativity_cube_unique(n)
        assert unique
        assert witness.vertex_sizes == associativity_cube(n).vertex_sizes


def test_rejects_small_n():
    with pytest.raises(ValueError):
        associativity_cube(2)
    with pytest.raises(ValueError):
        verify_associativity_cube_unique(6)


def test_noncommuting_cube_rejected_by_grid():
    # ord{3} with two different collapses but mismatched completions
    e1 = DeltaPlusMap.gap_collapse(3, 1)
    e2 = DeltaPlusMap.gap_collapse(3, 1)
    bottom1 = DeltaPlusMap.gap_collapse(2, 1)
    cube = DeltaPlusCube(
        2,
        {(0, 0): 3, (1, 0): 2, (0, 1): 2, (1, 1): 1},
        {((0, 0), 0): e1, ((0, 0), 1): e2, ((1, 0), 1): bottom1, ((0, 1), 0): bottom1},
    )
    assert cube.commutes()  # this one does commute (same collapse twice)
    bad = DeltaPlusCube(
        2,
        {(0, 0): 4, (1, 0): 3, (0, 1): 3, (1, 1): 2},
        {((0, 0), 0): DeltaPlusMap.gap_collapse(4, 1),
         ((0, 0), 1): DeltaPlusMap.gap_collapse(4, 3),
         ((1, 0), 1): DeltaPlusMap.gap_collapse(3, 1),
         ((0, 1), 0): DeltaPlusMap.gap_collapse(3, 1)},
    )
    assert not bad.commutes()
    with pytest.raises(ValueError):
        grid_complexes(bad)


def test_monotonicity_validation():
    with pytest.raises(AssertionError):
        DeltaPlusMap(2, 2, (1, 0))
