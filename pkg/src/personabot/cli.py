"""Command line entry points.

`simulate`, `stats` and `replay` embed the engine directly so batch runs and
verification need no server. `serve` starts the HTTP service and `chat` is a
thin interactive client for a running server.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .errors import PersonabotError
from .memory import ROBOTS
from .recall import RecallConfig, RecallMode
from .simulate import load_script, replay, run_script, stats, write_stats_csv
from .store import ModelStore


@click.group()
def main():
    """Robot personas that remember you differently, session after session."""


@main.command()
@click.option("--robot", required=True, type=click.Choice(ROBOTS))
@click.option("--script", "script_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sessions", default=2, show_default=True, type=int)
@click.option("--mode", default="threshold", show_default=True, type=click.Choice(["threshold", "stochastic"]))
@click.option("--threshold", default=0.7, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--store", "store_root", required=True, type=click.Path(file_okay=False))
def simulate(robot, script_path, sessions, mode, threshold, seed, store_root):
    """Run a scripted user through multi-session conversations."""
    try:
        script = load_script(script_path)
        config = RecallConfig(mode=RecallMode(mode), threshold=threshold, seed=seed)
        result = run_script(robot, script, sessions, config, ModelStore(store_root))
    except (PersonabotError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    for run in result.sessions:
        kinds = [act.kind.value for act in run.acts]
        click.echo(f"session {run.session_index} ({run.session_id}): {len(run.robot_turns)} robot turns")
        click.echo(f"  acts: {', '.join(kinds)}")
    click.echo(f"transcript: {result.log_path}")
    click.echo(json.dumps(result.model, indent=2, sort_keys=True))


@main.command(name="stats")
@click.option("--trials", default=10000, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
def stats_command(trials, seed, out_path):
    """Empirical remembered frequencies per (robot, family, valence) cell."""
    try:
        rows = stats(trials, seed)
    except (PersonabotError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    if out_path:
        write_stats_csv(rows, out_path)
        click.echo(f"wrote {len(rows)} cells to {out_path}")
    else:
        click.echo("robot,family,valence,expected,observed,trials")
        for row in rows:
            click.echo(
                f"{row.robot},{row.family},{row.valence},{row.expected},"
                f"{row.observed:.4f},{row.trials}"
            )


@main.command(name="replay")
@click.option("--transcript", "transcript_path", required=True, type=click.Path(exists=True, dir_okay=False))
def replay_command(transcript_path):
    """Re-drive a recorded transcript and verify robot turns byte-for-byte."""
    try:
        report = replay(transcript_path)
    except PersonabotError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(report.summary())
    if not report.identical:
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--store", "store_root", default="store", show_default=True, type=click.Path(file_okay=False))
@click.option("--mode", default="threshold", show_default=True, type=click.Choice(["threshold", "stochastic"]))
@click.option("--threshold", default=0.7, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--frontend", default=None, type=click.Path(file_okay=False), help="Built UI directory to serve at /ui.")
def serve(host, port, store_root, mode, threshold, seed, frontend):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import ServiceConfig, create_app

    config = ServiceConfig(
        store_root=Path(store_root),
        mode=RecallMode(mode),
        threshold=threshold,
        seed=seed,
        frontend_dist=Path(frontend) if frontend else None,
    )
    uvicorn.run(create_app(config), host=host, port=port)


@main.command()
@click.option("--server", default="http://127.0.0.1:8000", show_default=True)
@click.option("--user", "display_name", required=True, help="Display name; a fresh user is created.")
@click.option("--robot", required=True, type=click.Choice(ROBOTS))
@click.option("--valence", default=None, type=click.Choice(["positive", "neutral", "negative"]),
              help="Emotion side channel sent with the first message.")
@click.option("--attire", multiple=True, metavar="ASPECT=VALUE",
              help="Attire side channel sent with the first message; repeatable.")
def chat(server, display_name, robot, valence, attire):
    """Interactive chat against a running server (thin client, no local engine)."""
    import httpx

    attire_map = {}
    for item in attire:
        aspect, _, value = item.partition("=")
        if not aspect or not value:
            raise click.ClickException(f"--attire expects ASPECT=VALUE, got {item!r}")
        attire_map[aspect] = value

    with httpx.Client(base_url=server, timeout=30.0) as client:
        response = client.post("/users", json={"display_name": display_name})
        response.raise_for_status()
        user_id = response.json()["user_id"]
        response = client.post("/sessions", json={"user_id": user_id, "robot": robot})
        response.raise_for_status()
        session = response.json()
        click.echo(f"[session {session['session_index']} with {robot} as {user_id}]")
        click.echo(f"{robot}> {session['text']}")
        if session["phase"] == "closed":
            return
        first = True
        while True:
            try:
                line = click.prompt("you", prompt_suffix="> ")
            except click.Abort:
                click.echo("\n[left the session open]")
                return
            body = {"text": line}
            if first:
                if valence:
                    body["emotion_valence"] = valence
                if attire_map:
                    body["attire"] = attire_map
                first = False
            response = client.post(f"/sessions/{session['session_id']}/messages", json=body)
            if response.status_code >= 400:
                detail = response.json()
                raise click.ClickException(f"{detail.get('code')}: {detail.get('message')}")
            reply = response.json()
            badges = " ".join(f"[{act['kind']}]" for act in reply["acts"])
            click.echo(f"{robot}> {reply['text']}  {badges}")
            if reply["phase"] == "closed":
                click.echo("[session closed; the robot saved what it learned]")
                return


if __name__ == "__main__":
    main()
