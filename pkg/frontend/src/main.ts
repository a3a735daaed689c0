// App wiring: persona picker -> chat -> memory inspector, all state from the
// server. One active session per tab.

import { ApiError, Client, type ActView, type SessionView } from "./api.js";
import {
  attirePayload,
  badgeLabels,
  composerEnabled,
  describePhase,
  recordRows,
  traitBars,
  type AttireEntry,
} from "./views.js";

const params = new URLSearchParams(window.location.search);
const client = new Client(params.get("server") ?? "");

interface AppState {
  userId: string | null;
  displayName: string;
  robot: string | null;
  session: SessionView | null;
  phase: string | null;
  attire: AttireEntry[];
}

const state: AppState = {
  userId: localStorage.getItem("personabot.userId"),
  displayName: localStorage.getItem("personabot.displayName") ?? "",
  robot: null,
  session: null,
  phase: null,
  attire: [],
};

const app = document.getElementById("app")!;
app.innerHTML = `
  <header>
    <h1>personabot</h1>
    <p class="tagline">Three robot personalities. Three different memories of you.</p>
    <div id="banner" class="banner hidden"></div>
  </header>
  <main>
    <section id="picker" class="panel">
      <h2>Pick a robot to talk to</h2>
      <label>Your name
        <input id="display-name" type="text" placeholder="e.g. Benedetta" />
      </label>
      <div id="personas" class="personas"></div>
    </section>
    <section id="chat" class="panel hidden">
      <div class="chat-header">
        <h2 id="chat-title"></h2>
        <span id="chat-phase" class="phase"></span>
        <button id="end-to-picker" type="button">Choose another robot</button>
      </div>
      <div id="turns" class="turns"></div>
      <div class="composer">
        <div class="side-controls">
          <label>Mood
            <select id="valence">
              <option value="neutral" selected>neutral</option>
              <option value="positive">positive</option>
              <option value="negative">negative</option>
            </select>
          </label>
          <div class="attire-entry">
            <input id="attire-aspect" type="text" placeholder="attire aspect (e.g. color)" />
            <input id="attire-value" type="text" placeholder="value (e.g. blue)" />
            <button id="attire-add" type="button">Add attire</button>
          </div>
          <div id="attire-chips" class="chips"></div>
        </div>
        <div class="send-row">
          <input id="message" type="text" placeholder="Say something..." />
          <button id="send" type="button" disabled>Send</button>
        </div>
        <div class="send-row">
          <button id="next-session" type="button" class="hidden">Start next session</button>
        </div>
      </div>
    </section>
    <section id="inspector" class="panel hidden">
      <h2>What <span id="inspector-robot"></span> has in mind about you</h2>
      <p class="hint">Green rows were remembered this session, red rows forgotten, grey rows freshly stored.</p>
      <table>
        <thead>
          <tr><th>property</th><th>value</th><th>probability</th><th>status</th></tr>
        </thead>
        <tbody id="records"></tbody>
      </table>
      <p id="inspector-empty" class="hint hidden">Nothing stored yet: finish a session first.</p>
    </section>
  </main>
`;

const el = {
  banner: document.getElementById("banner")!,
  picker: document.getElementById("picker")!,
  personas: document.getElementById("personas")!,
  displayName: document.getElementById("display-name") as HTMLInputElement,
  chat: document.getElementById("chat")!,
  chatTitle: document.getElementById("chat-title")!,
  chatPhase: document.getElementById("chat-phase")!,
  toPicker: document.getElementById("end-to-picker") as HTMLButtonElement,
  turns: document.getElementById("turns")!,
  valence: document.getElementById("valence") as HTMLSelectElement,
  attireAspect: document.getElementById("attire-aspect") as HTMLInputElement,
  attireValue: document.getElementById("attire-value") as HTMLInputElement,
  attireAdd: document.getElementById("attire-add") as HTMLButtonElement,
  attireChips: document.getElementById("attire-chips")!,
  message: document.getElementById("message") as HTMLInputElement,
  send: document.getElementById("send") as HTMLButtonElement,
  nextSession: document.getElementById("next-session") as HTMLButtonElement,
  inspector: document.getElementById("inspector")!,
  inspectorRobot: document.getElementById("inspector-robot")!,
  records: document.getElementById("records")!,
  inspectorEmpty: document.getElementById("inspector-empty")!,
};

el.displayName.value = state.displayName;

function showBanner(text: string, retry?: () => void): void {
  el.banner.textContent = "";
  el.banner.classList.remove("hidden");
  el.banner.append(text);
  if (retry) {
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = "Retry";
    button.addEventListener("click", () => {
      hideBanner();
      retry();
    });
    el.banner.append(" ", button);
  }
}

function hideBanner(): void {
  el.banner.classList.add("hidden");
}

function setComposer(): void {
  const enabled = composerEnabled(state.phase);
  el.message.disabled = !enabled;
  el.send.disabled = !enabled || !el.message.value.trim();
  el.chatPhase.textContent = state.phase ? describePhase(state.phase) : "";
  el.nextSession.classList.toggle("hidden", state.phase !== "closed");
}

function appendTurn(speaker: string, text: string, acts: ActView[]): void {
  const turn = document.createElement("div");
  turn.className = `turn ${speaker}`;
  const who = document.createElement("span");
  who.className = "speaker";
  who.textContent = speaker === "robot" ? state.robot ?? "robot" : state.displayName || "you";
  const bubble = document.createElement("p");
  bubble.textContent = text;
  turn.append(who, bubble);
  if (speaker === "robot" && acts.length) {
    const badges = document.createElement("div");
    badges.className = "badges";
    for (const label of badgeLabels(acts)) {
      const badge = document.createElement("span");
      badge.className = "badge";
      badge.textContent = label;
      badges.append(badge);
    }
    turn.append(badges);
  }
  el.turns.append(turn);
  el.turns.scrollTop = el.turns.scrollHeight;
}

function renderAttireChips(): void {
  el.attireChips.textContent = "";
  state.attire.forEach((entry, index) => {
    const chip = document.createElement("span");
    chip.className = "chip";
    chip.textContent = `${entry.aspect}=${entry.value}`;
    const remove = document.createElement("button");
    remove.type = "button";
    remove.textContent = "x";
    remove.addEventListener("click", () => {
      state.attire.splice(index, 1);
      renderAttireChips();
    });
    chip.append(remove);
    el.attireChips.append(chip);
  });
}

async function refreshInspector(): Promise<void> {
  if (!state.userId || !state.robot) {
    return;
  }
  el.inspector.classList.remove("hidden");
  el.inspectorRobot.textContent = state.robot;
  try {
    const model = await client.model(state.userId, state.robot);
    el.records.textContent = "";
    const rows = recordRows(model.records);
    el.inspectorEmpty.classList.toggle("hidden", rows.length > 0);
    for (const row of rows) {
      const tr = document.createElement("tr");
      tr.className = row.statusClass;
      for (const cell of [row.label, row.value, row.probability, row.status]) {
        const td = document.createElement("td");
        td.textContent = cell;
        tr.append(td);
      }
      el.records.append(tr);
    }
  } catch (error) {
    showBanner(`Could not load the memory inspector: ${(error as Error).message}`);
  }
}

async function ensureUser(): Promise<string> {
  const name = el.displayName.value.trim();
  if (!name) {
    throw new ApiError(0, "empty_value", "Enter your name first.");
  }
  if (state.userId && state.displayName === name) {
    return state.userId;
  }
  const created = await client.createUser(name);
  state.userId = created.user_id;
  state.displayName = name;
  localStorage.setItem("personabot.userId", created.user_id);
  localStorage.setItem("personabot.displayName", name);
  return created.user_id;
}

function enterChat(session: SessionView): void {
  state.session = session;
  state.robot = session.robot;
  state.phase = session.phase;
  el.picker.classList.add("hidden");
  el.chat.classList.remove("hidden");
  el.chatTitle.textContent = `Session ${session.session_index} with ${session.robot}`;
  el.turns.textContent = "";
  appendTurn("robot", session.text, session.acts);
  setComposer();
  void refreshInspector();
}

async function resumeSession(sessionId: string, robot: string): Promise<void> {
  const transcript = await client.transcript(sessionId);
  state.session = {
    session_id: sessionId,
    user_id: transcript.user_id,
    robot,
    session_index: 0,
    created_at: "",
    phase: "slot_filling",
    acts: [],
    text: "",
  };
  state.robot = robot;
  state.phase = "slot_filling";
  el.picker.classList.add("hidden");
  el.chat.classList.remove("hidden");
  el.chatTitle.textContent = `Resumed session with ${robot}`;
  el.turns.textContent = "";
  for (const turn of transcript.turns) {
    appendTurn(turn.speaker, turn.text, turn.acts);
  }
  setComposer();
  void refreshInspector();
}

async function openSession(robot: string): Promise<void> {
  try {
    const userId = await ensureUser();
    const session = await client.openSession(userId, robot);
    hideBanner();
    enterChat(session);
  } catch (error) {
    if (error instanceof ApiError && error.code === "session_conflict" && error.sessionId) {
      const sessionId = error.sessionId;
      showBanner(`A session with ${robot} is already open.`);
      const resume = document.createElement("button");
      resume.type = "button";
      resume.textContent = "Resume it";
      resume.addEventListener("click", () => {
        hideBanner();
        void resumeSession(sessionId, robot);
      });
      el.banner.append(" ", resume);
      return;
    }
    if (error instanceof ApiError) {
      showBanner(error.message);
      return;
    }
    showBanner("Server unreachable.", () => void openSession(robot));
  }
}

async function sendMessage(): Promise<void> {
  const session = state.session;
  const text = el.message.value.trim();
  if (!session || !text) {
    return;
  }
  el.send.disabled = true;
  appendTurn("user", text, []);
  el.message.value = "";
  try {
    const reply = await client.sendMessage(session.session_id, text, {
      emotion_valence: el.valence.value as "positive" | "neutral" | "negative",
      attire: attirePayload(state.attire),
    });
    state.phase = reply.phase;
    appendTurn("robot", reply.text, reply.acts);
    setComposer();
    if (reply.phase === "closed") {
      void refreshInspector();
    }
  } catch (error) {
    if (error instanceof ApiError && error.code === "session_closed") {
      state.phase = "closed";
      setComposer();
      showBanner("This session is closed; start the next one to continue.");
    } else {
      showBanner(`Sending failed: ${(error as Error).message}`);
      el.send.disabled = false;
    }
  }
}

async function loadPersonas(): Promise<void> {
  try {
    const personas = await client.personas();
    hideBanner();
    el.personas.textContent = "";
    for (const persona of personas) {
      const card = document.createElement("article");
      card.className = "persona-card";
      const title = document.createElement("h3");
      title.textContent = persona.robot_id;
      const motto = document.createElement("p");
      motto.className = "motto";
      motto.textContent = `"${persona.motto}"`;
      card.append(title, motto);
      for (const bar of traitBars(persona)) {
        const row = document.createElement("div");
        row.className = "trait";
        const label = document.createElement("span");
        label.textContent = bar.name;
        const track = document.createElement("div");
        track.className = "track";
        const fill = document.createElement("div");
        fill.className = "fill";
        fill.style.width = bar.percent;
        track.append(fill);
        row.append(label, track);
        card.append(row);
      }
      const talk = document.createElement("button");
      talk.type = "button";
      talk.textContent = `Talk to ${persona.robot_id}`;
      talk.addEventListener("click", () => void openSession(persona.robot_id));
      card.append(talk);
      el.personas.append(card);
    }
  } catch {
    showBanner("Server unreachable.", () => void loadPersonas());
  }
}

el.send.addEventListener("click", () => void sendMessage());
el.message.addEventListener("input", setComposer);
el.message.addEventListener("keydown", (event) => {
  if (event.key === "Enter" && !el.send.disabled) {
    void sendMessage();
  }
});
el.attireAdd.addEventListener("click", () => {
  const aspect = el.attireAspect.value.trim();
  const value = el.attireValue.value.trim();
  if (aspect && value) {
    state.attire.push({ aspect, value });
    el.attireAspect.value = "";
    el.attireValue.value = "";
    renderAttireChips();
  }
});
el.nextSession.addEventListener("click", () => {
  if (state.robot) {
    void openSession(state.robot);
  }
});
el.toPicker.addEventListener("click", () => {
  el.chat.classList.add("hidden");
  el.picker.classList.remove("hidden");
});

void loadPersonas();
