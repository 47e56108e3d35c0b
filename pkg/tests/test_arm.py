import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gestarm.arm import (
    ArmGeometry,
    ArmState,
    FrameRejectedError,
    IncompleteFrameError,
    apply_command,
    decode_serial,
    encode_serial,
    forward_kinematics,
    iter_serial_commands,
    pacing_delay,
    static_torque,
)
from gestarm.fuzzy import ServoCommand

G = ArmGeometry()


class TestGeometry:
    def test_paper_dimensions_are_default(self):
        assert (G.base_height, G.lower_len, G.upper_len) == (11.0, 40.0, 20.0)
        assert (G.lower_mass, G.upper_mass, G.claw_mass) == (0.18, 0.11, 0.02)
        assert G.main_servo_rating == 15.0
        assert G.grip_servo_rating == 1.0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            ArmGeometry(lower_len=0.0)
        with pytest.raises(ValueError):
            ArmGeometry(claw_mass=-0.1)

    def test_state_range_checked(self):
        with pytest.raises(ValueError):
            ArmState(theta_base=181.0)
        with pytest.raises(ValueError):
            ArmState(theta_elbow=-1.0)


class TestApplyCommand:
    def test_direct_mapping(self):
        s = apply_command(ArmState(), ServoCommand(90, 90, 90))
        assert (s.theta_base, s.theta_shoulder, s.theta_elbow) == (90, 90, 90)
        s = apply_command(s, ServoCommand(0, 180, 90))
        assert (s.theta_base, s.theta_shoulder, s.theta_elbow) == (0, 180, 90)

    def test_idempotent(self):
        cmd = ServoCommand(10, 20, 30)
        once = apply_command(ArmState(), cmd)
        assert apply_command(once, cmd) == once


class TestForwardKinematics:
    def test_straight_up(self):
        x, y, z = forward_kinematics(ArmState(0, 90, 90), G)
        assert (x, y) == (0.0, 0.0)
        assert z == 77.0  # 11 + 40 + 20 + 6

    def test_straight_out(self):
        x, y, z = forward_kinematics(ArmState(0, 0, 90), G)
        assert (x, y, z) == (66.0, 0.0, 11.0)

    def test_base_yaw_rotates(self):
        x, y, z = forward_kinematics(ArmState(90, 0, 90), G)
        assert abs(x) < 1e-9
        assert y == pytest.approx(66.0, abs=1e-9)
        assert z == pytest.approx(11.0, abs=1e-9)

    def test_reach_envelope(self):
        rng = random.Random(9)
        for _ in range(300):
            state = ArmState(rng.uniform(0, 180), rng.uniform(0, 180), rng.uniform(0, 180))
            x, y, z = forward_kinematics(state, G)
            assert math.hypot(x, y) <= 66.0 + 1e-9
            assert 11.0 - 66.0 - 1e-9 <= z <= 11.0 + 66.0 + 1e-9


class TestStaticTorque:
    def test_horizontal_reach(self):
        t = static_torque(ArmState(0, 0, 90), G)
        # 0.18*20 + 0.11*50 + 0.02*63
        assert t.shoulder == pytest.approx(10.36, abs=1e-9)
        assert not t.shoulder_overload and not t.elbow_overload

    def test_payload_overloads_shoulder(self):
        t = static_torque(ArmState(0, 0, 90), G, payload_kg=0.1)
        assert t.shoulder == pytest.approx(16.96, abs=1e-9)
        assert t.shoulder_overload and not t.elbow_overload
        assert t.flags() == frozenset({"shoulder"})

    def test_vertical_pose_is_zero(self):
        t = static_torque(ArmState(0, 90, 90), G)
        assert t.shoulder == 0.0 and t.elbow == 0.0

    def test_monotone_in_payload(self):
        rng = random.Random(4)
        for _ in range(50):
            state = ArmState(rng.uniform(0, 180), rng.uniform(0, 180), rng.uniform(0, 180))
            last_s = last_e = -1.0
            for payload in (0.0, 0.05, 0.1, 0.5, 1.0):
                t = static_torque(state, G, payload)
                assert t.shoulder >= last_s and t.elbow >= last_e
                last_s, last_e = t.shoulder, t.elbow

    def test_negative_payload_rejected(self):
        with pytest.raises(ValueError):
            static_torque(ArmState(), G, payload_kg=-0.1)


class TestSerialCodec:
    def test_encode_format(self):
        assert encode_serial(ServoCommand(90, 45, 120)).payload == b"(90,45,120)\n"
        assert encode_serial(ServoCommand(0, 0, 0)).payload == b"(0,0,0)\n"

    def test_decode_inverse(self):
        cmd, rest = decode_serial(b"(90,45,120)\n")
        assert cmd == ServoCommand(90, 45, 120)
        assert rest == b""

    def test_resync_past_garbage(self):
        cmd, rest = decode_serial(b"garbage(10,20,30)\n")
        assert cmd == ServoCommand(10, 20, 30)

    def test_out_of_range_rejected(self):
        with pytest.raises(FrameRejectedError):
            decode_serial(b"(200,0,0)\n")

    def test_incomplete_buffer(self):
        with pytest.raises(IncompleteFrameError):
            decode_serial(b"(90,45")
        with pytest.raises(IncompleteFrameError):
            decode_serial(b"nothing here")

    def test_resync_through_malformed_frames(self):
        cmd, rest = decode_serial(b"(1,2)\n((3,4,5)\n(6,7,8)\n")
        assert cmd == ServoCommand(3, 4, 5)
        assert rest == b"(6,7,8)\n"

    @given(st.integers(0, 180), st.integers(0, 180), st.integers(0, 180))
    @settings(max_examples=200, deadline=None)
    def test_round_trip_property(self, x, y, z):
        cmd = ServoCommand(x, y, z)
        decoded, rest = decode_serial(encode_serial(cmd).payload)
        assert decoded == cmd and rest == b""

    def test_stream_iteration_skips_rejects(self):
        stream = b"(1,1,1)\nnoise(200,0,0)\n(2,2,2)\n(3,3"
        cmds = list(iter_serial_commands(stream))
        assert cmds == [ServoCommand(1, 1, 1), ServoCommand(2, 2, 2)]

    def test_pacing_delay(self):
        frame = encode_serial(ServoCommand(90, 45, 120))  # 12 bytes
        assert pacing_delay(frame) == pytest.approx(12 * 10 / 9600)
