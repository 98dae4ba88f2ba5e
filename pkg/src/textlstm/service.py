"""HTTP service exposing frozen checkpoints for interactive generation.

Checkpoints are loaded once at startup and never mutated; every request
builds its own sampler state and PRNG, so identical seeded requests give
identical results even when handled concurrently.
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, ConfigDict, Field

from . import chords, drums, midi
from .model import LstmModel, load_checkpoint
from .sampling import AlphaRegion, AlphaSchedule, GenerationRequest, generate
from .vocabulary import OovTokenError

__all__ = ["create_app", "main"]

API_PREFIX = "/api/v1"


class AlphaRegionMessage(BaseModel):
    start: int
    end: int
    alpha: float


class GenerateRequestMessage(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model_id: str
    seed_tokens: list[str]
    length: int
    default_alpha: float = 1.0
    alpha_regions: list[AlphaRegionMessage] = Field(default_factory=list)
    seed: int | None = None


class GenerateResponseMessage(BaseModel):
    tokens: list[str]
    rendered: str
    elapsed_ms: float


class RenderMidiRequest(BaseModel):
    tokens: list[str]
    tempo_bpm: float = 120.0


def render_tokens(model: LstmModel, tokens: list[str]) -> str:
    """Human view of a generated sequence, by corpus kind."""
    if model.vocab.mode == "word" and model.domain == "chord":
        return chords.decode_progression(tokens)
    if model.vocab.mode == "word" and model.domain == "drum":
        rows: list[list[str]] = []
        for tok in tokens:
            if tok == drums.BAR_FLAG or not rows:
                rows.append([])
            rows[-1].append(tok)
        return "\n".join(" ".join(row) for row in rows)
    return model.vocab.decode([model.vocab.index[t] for t in tokens])


def _seed_text(model: LstmModel, seed_tokens: list[str]) -> str:
    joiner = " " if model.vocab.mode == "word" else ""
    return joiner.join(seed_tokens)


def create_app(
    checkpoints: list[str | Path], cors_origins: list[str] | None = None
) -> FastAPI:
    models: dict[str, LstmModel] = {
        Path(p).stem: load_checkpoint(p) for p in checkpoints
    }
    app = FastAPI(title="textlstm service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        detail = [
            {"field": ".".join(str(p) for p in err["loc"]), "message": err["msg"]}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": detail})

    @app.get(f"{API_PREFIX}/health")
    def health():
        return {"status": "ok", "models": len(models)}

    @app.get(f"{API_PREFIX}/models")
    def list_models():
        return [
            {
                "id": model_id,
                "mode": model.vocab.mode,
                "domain": model.domain,
                "vocab_size": model.vocab_size,
                "hidden_size": model.hidden_size,
            }
            for model_id, model in sorted(models.items())
        ]

    @app.post(f"{API_PREFIX}/generate", response_model=GenerateResponseMessage)
    def handle_generate(msg: GenerateRequestMessage):
        model = models.get(msg.model_id)
        if model is None:
            raise HTTPException(404, f"unknown model {msg.model_id!r}")
        if msg.length < 0:
            raise HTTPException(400, "length must be >= 0")
        if msg.length > 0 and not msg.seed_tokens:
            raise HTTPException(400, "seed_tokens must not be empty")
        try:
            schedule = AlphaSchedule(
                default_alpha=msg.default_alpha,
                regions=tuple(
                    AlphaRegion(r.start, r.end, r.alpha) for r in msg.alpha_regions
                ),
            )
            request = GenerationRequest(
                seed_text=_seed_text(model, msg.seed_tokens),
                length=msg.length,
                schedule=schedule,
                seed=msg.seed,
            )
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc
        start = time.perf_counter()
        try:
            stream = generate(model, request)
        except OovTokenError as exc:
            raise HTTPException(422, str(exc)) from exc
        tokens = stream.tokens()
        return GenerateResponseMessage(
            tokens=tokens,
            rendered=render_tokens(model, tokens),
            elapsed_ms=(time.perf_counter() - start) * 1000.0,
        )

    @app.post(f"{API_PREFIX}/render/midi")
    def handle_render_midi(msg: RenderMidiRequest):
        try:
            events, skipped = drums.decode_words(msg.tokens, msg.tempo_bpm)
            data = midi.write_smf(events, msg.tempo_bpm)
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc
        return Response(
            content=data,
            media_type="audio/midi",
            headers={"X-Skipped-Tokens": str(skipped)},
        )

    return app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="textlstm-serve", description="Serve checkpoints for the workbench."
    )
    parser.add_argument("--models", required=True, help="directory of .ckpt files")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument(
        "--cors-origin",
        action="append",
        help="allowed browser origin; repeatable (default: any)",
    )
    args = parser.parse_args(argv)
    checkpoints = sorted(Path(args.models).glob("*.ckpt"))
    app = create_app(checkpoints, cors_origins=args.cors_origin)

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
