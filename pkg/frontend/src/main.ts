import { GatewayClient, ConnectionStatus } from "./gateway.js";
import { HandPad } from "./handpad.js";
import { ArmStateMsg, formatGrip } from "./messages.js";
import { Point, buildScene, paint } from "./render.js";
import { RingBuffer } from "./trace.js";

const TRACE_CAPACITY = 300;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
}

function main(): void {
  const params = new URLSearchParams(location.search);
  const gatewayUrl =
    params.get("gateway") ?? `ws://${location.hostname || "127.0.0.1"}:7421/`;

  const statusNode = el<HTMLSpanElement>("status");
  const sideCanvas = el<HTMLCanvasElement>("side-view");
  const topCanvas = el<HTMLCanvasElement>("top-view");
  const padNode = el<HTMLDivElement>("pad");
  const padKnob = el<HTMLDivElement>("pad-knob");
  const gripButton = el<HTMLButtonElement>("grip");
  const readout = el<HTMLDivElement>("readout");
  const dials = ["base", "shoulder", "elbow"].map((n) => el<HTMLDivElement>(`dial-${n}`));
  const bars = ["shoulder", "elbow"].map((n) => el<HTMLDivElement>(`torque-${n}`));

  const sideCtx = sideCanvas.getContext("2d")!;
  const topCtx = topCanvas.getContext("2d")!;
  const trace = new RingBuffer<Point>(TRACE_CAPACITY);
  let gripClosed = false;

  const gateway = new GatewayClient(gatewayUrl, {
    onState: (state: ArmStateMsg) => {
      trace.push({ x: state.fkX, y: state.fkY });
      const scene = buildScene(state);
      paint(scene, sideCtx, topCtx, trace.values());
      scene.dials.forEach((dial, i) => {
        dials[i].textContent = `${dial.label} ${dial.degrees}°`;
      });
      scene.torque.forEach((bar, i) => {
        bars[i].textContent = bar.joint + (bar.overloaded ? " OVERLOAD" : " ok");
        bars[i].classList.toggle("overload", bar.overloaded);
      });
      readout.textContent =
        `fk (${state.fkX.toFixed(1)}, ${state.fkY.toFixed(1)}, ` +
        `${state.fkZ.toFixed(1)}) cm`;
    },
    onStatus: (status: ConnectionStatus) => {
      statusNode.textContent =
        status.kind === "reconnecting"
          ? `reconnecting in ${status.seconds}s`
          : status.kind;
      statusNode.classList.toggle("ok", status.kind === "open");
    },
  });

  const pad = new HandPad((line) => gateway.send(line));

  padNode.addEventListener("pointerdown", (event) => {
    padNode.setPointerCapture(event.pointerId);
    const rect = padNode.getBoundingClientRect();
    // drag is measured from the pad center, like hand motion from the
    // previous hand center
    pad.begin(rect.left + rect.width / 2, rect.top + rect.height / 2);
    pad.move(event.clientX, event.clientY);
    moveKnob(event);
  });
  padNode.addEventListener("pointermove", (event) => {
    if (pad.isDragging) {
      pad.move(event.clientX, event.clientY);
      moveKnob(event);
    }
  });
  const end = () => {
    pad.release();
    padKnob.style.transform = "translate(0px, 0px)";
  };
  padNode.addEventListener("pointerup", end);
  padNode.addEventListener("pointercancel", end);
  padNode.addEventListener(
    "wheel",
    (event) => {
      event.preventDefault();
      pad.wheel(Math.max(-100, Math.min(100, -event.deltaY)));
    },
    { passive: false },
  );

  function moveKnob(event: PointerEvent): void {
    const rect = padNode.getBoundingClientRect();
    const limit = rect.width / 2 - 14;
    const kx = Math.max(-limit, Math.min(limit, event.clientX - rect.left - rect.width / 2));
    const ky = Math.max(-limit, Math.min(limit, event.clientY - rect.top - rect.height / 2));
    padKnob.style.transform = `translate(${kx}px, ${ky}px)`;
  }

  gripButton.addEventListener("click", () => {
    gripClosed = !gripClosed;
    gateway.send(formatGrip(gripClosed));
    gripButton.textContent = gripClosed ? "open grip" : "close grip";
  });

  gateway.connect();
}

window.addEventListener("load", main);
