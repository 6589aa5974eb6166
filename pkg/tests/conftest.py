import pytest

from dft2gspn import galileo

# Failure-propagation race: the priority-and Z sees B both directly and
# through the or-gate X.
F1 = """\
toplevel "Z";
"Z" pand "X" "B";
"X" or "A" "B";
"A" lambda=1.0 dorm=1.0;
"B" lambda=1.0 dorm=1.0;
"""

# Dependency forwarding race: D forwards B's failure to A, Z wants A first.
F2 = """\
toplevel "Z";
"Z" pand "A" "B";
"D" fdep "B" "A";
"A" lambda=1.0 dorm=1.0;
"B" lambda=1.0 dorm=1.0;
"""

# Spare race: X's failure knocks out both primaries, S1 and S2 compete for C.
F3 = """\
toplevel "Z";
"Z" pand "S1" "S2";
"S1" spare "A" "C";
"S2" spare "B" "C";
"D" fdep "X" "A" "B";
"A" lambda=1.0 dorm=1.0;
"B" lambda=1.0 dorm=1.0;
"C" lambda=1.0 dorm=1.0;
"X" lambda=1.0 dorm=1.0;
"X" failed;
"""

# Cyclic forwarding at the level of basic events only.
F4 = """\
toplevel "T";
"T" and "A" "B";
"D" fdep "A" "B";
"E" fdep "B" "A";
"A" lambda=1.0 dorm=1.0;
"B" lambda=1.0 dorm=1.0;
"""

# Gate-triggered dependency with consistent priorities: B's failure reaches C
# through S and D before the priority-and evaluates.
F5 = """\
toplevel "Z";
"S" or "A" "B";
"D" fdep "S" "C";
"Z" pand "C" "B";
"A" lambda=1.0 dorm=1.0;
"B" lambda=1.0 dorm=1.0;
"C" lambda=1.0 dorm=1.0;
"B" failed;
"""

# Paradoxical gate-triggered dependency: no priority assignment exists.
F6 = """\
toplevel "Z";
"Z" por_excl "A" "B";
"D" fdep "Z" "B";
"A" lambda=1.0 dorm=1.0;
"B" lambda=1.0 dorm=1.0;
"A" failed;
"""

# The PC that fails on RAM failure, power-then-switch, or power-and-UPS.
FIG1B = """\
toplevel "PC";
"PC" or "RAM" "SUB";
"SUB" or "PP" "PA";
"PP" pand "Switch" "Power";
"PA" and "Power" "UPS";
"RAM" lambda=1.0 dorm=1.0;
"Switch" lambda=1.0 dorm=1.0;
"Power" lambda=1.0 dorm=1.0;
"UPS" lambda=1.0 dorm=1.0;
"""

# Motor bike: either wheel can claim the one spare wheel.
BIKE = """\
toplevel "SF";
"SF" or "FW" "BW";
"FW" wsp "W1" "WS";
"BW" wsp "W2" "WS";
"W1" lambda=1.0 dorm=1.0;
"W2" lambda=1.0 dorm=1.0;
"WS" lambda=1.0 dorm=0.5;
"""

# Nested spare modules: four modules, representatives A1, B1, C1, D1.
NESTED = """\
toplevel "SF";
"SF" spare "A1" "B1";
"A1" or "A2" "A3";
"B1" and "SP2" "B2";
"SP2" spare "C1" "D1";
"A2" lambda=1.0 dorm=0.5;
"A3" lambda=1.0 dorm=0.5;
"B2" lambda=1.0 dorm=0.5;
"C1" lambda=1.0 dorm=0.5;
"D1" lambda=1.0 dorm=0.5;
"""

SINGLE_BE = """\
toplevel "A";
"A" lambda=1.0 dorm=1.0;
"""

VOT_2OF3 = """\
toplevel "V";
"V" 2of3 "A" "B" "C";
"A" lambda=1.0 dorm=1.0;
"B" lambda=1.0 dorm=1.0;
"C" lambda=1.0 dorm=1.0;
"""

# And-gate that can only fail in the order A then B.
SEQ_AND = """\
toplevel "SF";
"SF" and "A" "B";
"Q" seq "A" "B";
"A" lambda=1.0 dorm=1.0;
"B" lambda=1.0 dorm=1.0;
"""

# A's failure takes B down with probability 0.8.
PDEP_08 = """\
toplevel "SF";
"SF" and "A" "B";
"P" pdep=0.8 "A" "B";
"A" lambda=1.0 dorm=1.0;
"B" lambda=1.0 dorm=1.0;
"""

MUTEX_PAIR = """\
toplevel "SF";
"SF" or "A" "B";
"M" mutex "A" "B";
"A" lambda=1.0 dorm=1.0;
"B" lambda=1.0 dorm=1.0;
"""

ALL_PROFILES = ("monolithic-ctmc", "ioimc", "monolithic-ma", "gspn-orig", "gspn-new")


def parse(text):
    return galileo.parse_galileo(text)


@pytest.fixture
def f1():
    return parse(F1)


@pytest.fixture
def f2():
    return parse(F2)


@pytest.fixture
def f3():
    return parse(F3)


@pytest.fixture
def f5():
    return parse(F5)


@pytest.fixture
def f6():
    return parse(F6)


@pytest.fixture
def bike():
    return parse(BIKE)


@pytest.fixture
def nested():
    return parse(NESTED)
