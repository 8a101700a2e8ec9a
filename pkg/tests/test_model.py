from catnip import iter_nodes, parse_project, programs_equal
from catnip.model import Node, block_nodes, nodes_equal, program_tree


def test_iter_nodes_bowl_only(bowl_only_path):
    program = parse_project(bowl_only_path)
    nodes = list(iter_nodes(program))
    # 1 script container + 5 blocks + 5 field/literal leaves
    assert len(nodes) == 11
    labels = [n.label for _, _, n in nodes]
    assert labels[0] == "script"
    assert labels[1] == "event_whenflagclicked"
    assert labels.count("lit:number") == 2
    assert labels.count("lit:string") == 2
    assert "field:Score" in labels


def test_node_ids_preorder_consecutive(bowl_only_path):
    program = parse_project(bowl_only_path)
    for actor in program.actors:
        for script in actor.scripts:
            ids = [n.node_id for n in script.root.walk()]
            assert ids == list(range(len(ids)))


def test_iter_nodes_deterministic(bowl_only_path):
    program = parse_project(bowl_only_path)
    first = [(a.name, s.script_index, n.node_id) for a, s, n in iter_nodes(program)]
    second = [(a.name, s.script_index, n.node_id) for a, s, n in iter_nodes(program)]
    assert first == second


def test_iter_nodes_empty_program(empty_stage_path):
    program = parse_project(empty_stage_path)
    assert list(iter_nodes(program)) == []


def test_program_tree_shape(bowl_only_path):
    program = parse_project(bowl_only_path)
    tree = program_tree(program)
    assert tree.label == "program"
    assert [c.label for c in tree.children] == ["actor", "actor"]
    assert tree.children[1].children[0].label == "script"


def test_block_nodes_excludes_leaves_and_containers(bowl_only_path):
    program = parse_project(bowl_only_path)
    script = program.actors[1].scripts[0]
    labels = [n.label for n in block_nodes(script)]
    assert labels == [
        "event_whenflagclicked",
        "motion_gotoxy",
        "looks_show",
        "data_setvariableto",
        "looks_say",
    ]


def test_structural_equality(bowl_only_path):
    a = parse_project(bowl_only_path)
    b = parse_project(bowl_only_path)
    assert programs_equal(a, b)
    b.actors[1].scripts[0].root.children.pop()
    assert not programs_equal(a, b)


def test_nodes_equal_ignores_raw_refs():
    a = Node("x", [Node("y")], raw_ref="one")
    b = Node("x", [Node("y")], raw_ref="two")
    assert nodes_equal(a, b)
    assert not nodes_equal(a, Node("x", [Node("z")]))
