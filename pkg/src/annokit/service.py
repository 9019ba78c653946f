"""Stateless HTTP facade over the pipeline.

Every endpoint reads its upload into memory, processes it through the
same workflow functions the CLI uses (so responses are byte-identical to
CLI outputs) and returns the result without writing anything to disk:
uploaded data lives only for the duration of the request.

Environment: PORT (serve port), MAX_UPLOAD_MB (reject larger uploads with
413, default 64), WORKERS (concurrent heavy jobs, default 4), UI_ORIGIN
(CORS origin, default "*").
"""

from __future__ import annotations

import io
import json
import os
import threading
from typing import Optional

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from . import __version__, compilation, distribution, model, workflows
from .errors import AnnokitError, InfeasibleRedistributionError

_MB = 1024 * 1024


def _int_env(name: str, default: int) -> int:
    try:
        return int(os.environ.get(name, default))
    except ValueError:
        return default


def create_app() -> FastAPI:
    app = FastAPI(title="annokit service", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[os.environ.get("UI_ORIGIN", "*")],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    max_upload = _int_env("MAX_UPLOAD_MB", 64) * _MB
    # bounds concurrent heavy jobs; health stays off this semaphore
    jobs = threading.BoundedSemaphore(_int_env("WORKERS", 4))

    @app.exception_handler(AnnokitError)
    async def _annokit_error(request: Request, exc: AnnokitError):
        status = 409 if isinstance(exc, InfeasibleRedistributionError) else 400
        body = {"error": exc.name, "detail": str(exc)}
        if getattr(exc, "stuck_samples", None):
            body["stuck_samples"] = list(exc.stuck_samples)
        return JSONResponse(status_code=status, content=body)

    async def _read_upload(upload: UploadFile) -> bytes:
        data = await upload.read()
        if len(data) > max_upload:
            raise _TooLarge(len(data))
        return data

    class _TooLarge(Exception):
        def __init__(self, size: int):
            self.size = size

    @app.exception_handler(_TooLarge)
    async def _too_large(request: Request, exc: _TooLarge):
        return JSONResponse(
            status_code=413,
            content={
                "error": "UploadTooLarge",
                "detail": f"upload of {exc.size} bytes exceeds the "
                f"{max_upload // _MB} MB limit",
            },
        )

    def _spec(raw: str) -> distribution.ResourceSpec:
        return distribution.ResourceSpec.from_json(json.loads(raw))

    @app.get("/api/health")
    async def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/distribute")
    async def api_distribute(
        file: UploadFile = File(...),
        spec: str = Form(...),
        seed: int = Form(0),
        names: Optional[str] = Form(None),
        ring_span: int = Form(1),
    ):
        data = await _read_upload(file)

        def work():
            frame = model.read_frame(io.BytesIO(data))
            name_list = (
                [n.strip() for n in names.split(",") if n.strip()] if names else None
            )
            _, _, files = workflows.run_distribute(
                frame, _spec(spec), seed=seed, annotator_names=name_list,
                ring_span=ring_span,
            )
            return compilation.make_zip_bytes(files)

        payload = await _run_job(work)
        return Response(
            content=payload,
            media_type="application/zip",
            headers={"Content-Disposition": 'attachment; filename="allocation.zip"'},
        )

    @app.post("/api/redistribute")
    async def api_redistribute(
        file: UploadFile = File(...),
        spec: str = Form(...),
        seed: int = Form(0),
        names: Optional[str] = Form(None),
        data_columns: Optional[str] = Form(None),
    ):
        data = await _read_upload(file)

        def work():
            frame = model.read_frame(io.BytesIO(data))
            name_list = (
                [n.strip() for n in names.split(",") if n.strip()] if names else None
            )
            cols = (
                [c.strip() for c in data_columns.split(",") if c.strip()]
                if data_columns
                else ()
            )
            _, _, files = workflows.run_redistribute(
                frame, _spec(spec), seed=seed, annotator_names=name_list,
                data_columns=cols,
            )
            return compilation.make_zip_bytes(files)

        payload = await _run_job(work)
        return Response(
            content=payload,
            media_type="application/zip",
            headers={"Content-Disposition": 'attachment; filename="redistribution.zip"'},
        )

    @app.post("/api/compile")
    async def api_compile(
        file: UploadFile = File(...),
        renames: Optional[str] = Form(None),
    ):
        data = await _read_upload(file)

        def work():
            rename_map = json.loads(renames) if renames else None
            frame = compilation.compile_archive(data, renames=rename_map)
            return model.frame_to_csv_bytes(frame)

        payload = await _run_job(work)
        return Response(
            content=payload,
            media_type="text/csv",
            headers={"Content-Disposition": 'attachment; filename="compiled.csv"'},
        )

    @app.post("/api/reliability")
    async def api_reliability(
        file: UploadFile = File(...),
        config: Optional[str] = Form(None),
    ):
        data = await _read_upload(file)

        def work():
            options = json.loads(config) if config else {}
            mapping = options.get("mapping")
            if mapping is not None:
                mapping = model.LabelMapping.from_dict(mapping)
            frame = model.read_frame(io.BytesIO(data))
            return workflows.run_reliability(
                frame,
                metric=options.get("metric", "krippendorff_nominal"),
                alpha=options.get("alpha", 0.5),
                overlap_threshold=options.get("overlap_threshold", 0),
                label_generator=options.get("label_generator", "default"),
                mapping=mapping,
                annotators=options.get("annotators"),
                data_columns=options.get("data_columns", ()),
                outputs=options.get("outputs", workflows.RELIABILITY_OUTPUTS),
                heatmap_annotators=options.get("heatmap_annotators"),
                heatmap_others=options.get("heatmap_others"),
            )

        return await _run_job(work)

    async def _run_job(work):
        import anyio

        def bounded():
            with jobs:
                return work()

        return await anyio.to_thread.run_sync(bounded)

    return app


app = create_app()


def main() -> None:
    import uvicorn

    uvicorn.run(
        "annokit.service:app",
        host="0.0.0.0",
        port=_int_env("PORT", 8000),
        workers=1,
    )


if __name__ == "__main__":
    main()
