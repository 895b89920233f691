//! ASCII OBJ and PLY (ascii / binary little endian) reading and writing.
//!
//! Positions are written with 17 significant digits so that a save/load cycle
//! reproduces every coordinate bit for bit.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::TriangleMesh;
use crate::geom::{Point2, Point3};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    /// ASCII PLY.
    Ply,
    PlyBinary,
}

impl MeshFormat {
    /// Guesses the format from the file extension (`.obj` or `.ply`).
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "obj" => Some(MeshFormat::Obj),
            "ply" => Some(MeshFormat::Ply),
            _ => None,
        }
    }
}

/// Reads a triangle mesh, preserving vertex order.
///
/// The mesh is checked for index validity, non-manifold edges and degenerate
/// faces. Closedness is left to the consumers that need it.
pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<TriangleMesh> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (vertices, faces) = match format {
        MeshFormat::Obj => parse_obj(&String::from_utf8_lossy(&bytes))?,
        MeshFormat::Ply | MeshFormat::PlyBinary => parse_ply(&bytes)?,
    };
    let mesh = TriangleMesh::new(vertices, faces)?;
    mesh.edge_topology()?;
    mesh.check_degenerate_faces()?;
    Ok(mesh)
}

/// Writes `mesh`, optionally with one texture coordinate per vertex.
pub fn save_mesh(
    mesh: &TriangleMesh,
    path: &Path,
    format: MeshFormat,
    uv: Option<&[Point2]>,
) -> Result<()> {
    if let Some(uv) = uv {
        if uv.len() != mesh.num_vertices() {
            return Err(Error::InvalidParameter(format!(
                "uv has {} entries, mesh has {} vertices",
                uv.len(),
                mesh.num_vertices()
            )));
        }
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let res = match format {
        MeshFormat::Obj => write_obj(&mut w, mesh, uv),
        MeshFormat::Ply => write_ply_ascii(&mut w, mesh, uv),
        MeshFormat::PlyBinary => write_ply_binary(&mut w, mesh, uv),
    };
    res.and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Writes an OBJ whose texture coordinates are indexed separately from the
/// positions, so seam vertices can carry one coordinate per copy.
///
/// `uv_faces[f]` lists the texture indices of the corners of `mesh.faces[f]`.
pub fn save_obj_with_seam_uv(
    mesh: &TriangleMesh,
    uv: &[Point2],
    uv_faces: &[[usize; 3]],
    path: &Path,
) -> Result<()> {
    if uv_faces.len() != mesh.num_faces() || uv_faces.iter().flatten().any(|&t| t >= uv.len()) {
        return Err(Error::InvalidParameter(
            "texture faces do not match the mesh".into(),
        ));
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let res = (|| -> std::io::Result<()> {
        for p in &mesh.vertices {
            writeln!(w, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
        }
        for t in uv {
            writeln!(w, "vt {:.16e} {:.16e}", t[0], t[1])?;
        }
        for (f, tf) in mesh.faces.iter().zip(uv_faces) {
            writeln!(
                w,
                "f {}/{} {}/{} {}/{}",
                f[0] + 1,
                tf[0] + 1,
                f[1] + 1,
                tf[1] + 1,
                f[2] + 1,
                tf[2] + 1
            )?;
        }
        w.flush()
    })();
    res.map_err(|e| Error::io(path, e))
}

fn parse_obj(text: &str) -> Result<(Vec<Point3>, Vec<[usize; 3]>)> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for c in p.iter_mut() {
                    let tok = tokens.next().ok_or_else(|| Error::Parse {
                        line: line_no,
                        message: "vertex needs three coordinates".into(),
                    })?;
                    *c = tok.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("bad coordinate '{tok}'"),
                    })?;
                }
                vertices.push(p);
            }
            Some("f") => {
                let refs: Vec<&str> = tokens.collect();
                if refs.len() != 3 {
                    return Err(Error::NonTriangularFace { line: line_no });
                }
                let mut f = [0usize; 3];
                for (slot, r) in f.iter_mut().zip(&refs) {
                    let idx = r.split('/').next().unwrap_or("");
                    let i: i64 = idx.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("bad face index '{r}'"),
                    })?;
                    let resolved = if i > 0 {
                        i - 1
                    } else {
                        vertices.len() as i64 + i
                    };
                    if i == 0 || resolved < 0 {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("face index {i} out of range"),
                        });
                    }
                    *slot = resolved as usize;
                }
                faces.push(f);
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

fn write_obj(
    w: &mut impl Write,
    mesh: &TriangleMesh,
    uv: Option<&[Point2]>,
) -> std::io::Result<()> {
    for p in &mesh.vertices {
        writeln!(w, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    if let Some(uv) = uv {
        for t in uv {
            writeln!(w, "vt {:.16e} {:.16e}", t[0], t[1])?;
        }
        for f in &mesh.faces {
            let [a, b, c] = f.map(|v| v + 1);
            writeln!(w, "f {a}/{a} {b}/{b} {c}/{c}")?;
        }
    } else {
        for f in &mesh.faces {
            writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
    }
    Ok(())
}

fn ply_header(
    w: &mut impl Write,
    format: &str,
    mesh: &TriangleMesh,
    uv: bool,
) -> std::io::Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format {format} 1.0")?;
    writeln!(w, "element vertex {}", mesh.num_vertices())?;
    for name in ["x", "y", "z"] {
        writeln!(w, "property double {name}")?;
    }
    if uv {
        writeln!(w, "property double u")?;
        writeln!(w, "property double v")?;
    }
    writeln!(w, "element face {}", mesh.num_faces())?;
    writeln!(w, "property list uchar int vertex_indices")?;
    writeln!(w, "end_header")
}

fn write_ply_ascii(
    w: &mut impl Write,
    mesh: &TriangleMesh,
    uv: Option<&[Point2]>,
) -> std::io::Result<()> {
    ply_header(w, "ascii", mesh, uv.is_some())?;
    for (i, p) in mesh.vertices.iter().enumerate() {
        write!(w, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
        if let Some(uv) = uv {
            write!(w, " {:.16e} {:.16e}", uv[i][0], uv[i][1])?;
        }
        writeln!(w)?;
    }
    for f in &mesh.faces {
        writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
    }
    Ok(())
}

fn write_ply_binary(
    w: &mut impl Write,
    mesh: &TriangleMesh,
    uv: Option<&[Point2]>,
) -> std::io::Result<()> {
    ply_header(w, "binary_little_endian", mesh, uv.is_some())?;
    for (i, p) in mesh.vertices.iter().enumerate() {
        for c in p {
            w.write_all(&c.to_le_bytes())?;
        }
        if let Some(uv) = uv {
            w.write_all(&uv[i][0].to_le_bytes())?;
            w.write_all(&uv[i][1].to_le_bytes())?;
        }
    }
    for f in &mesh.faces {
        w.write_all(&[3u8])?;
        for &v in f {
            w.write_all(&(v as i32).to_le_bytes())?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::U32 => u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug)]
enum Property {
    Scalar(String, Scalar),
    List(String, Scalar, Scalar),
}

#[derive(Debug)]
struct Element {
    name: String,
    count: usize,
    props: Vec<Property>,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_ply(bytes: &[u8]) -> Result<(Vec<Point3>, Vec<[usize; 3]>)> {
    let mut pos = 0;
    let mut line_no = 0;
    let next_line = |pos: &mut usize| -> Option<String> {
        if *pos >= bytes.len() {
            return None;
        }
        let end = bytes[*pos..]
            .iter()
            .position(|&b| b == b'\n')
            .map_or(bytes.len(), |i| *pos + i);
        let line = String::from_utf8_lossy(&bytes[*pos..end])
            .trim_end_matches('\r')
            .to_string();
        *pos = (end + 1).min(bytes.len());
        Some(line)
    };

    let mut binary = None;
    let mut elements: Vec<Element> = Vec::new();
    loop {
        line_no += 1;
        let line = next_line(&mut pos).ok_or_else(|| parse_error(line_no, "missing end_header"))?;
        let t: Vec<&str> = line.split_whitespace().collect();
        match t.first().copied() {
            Some("ply") if line_no == 1 => {}
            _ if line_no == 1 => return Err(parse_error(1, "missing 'ply' magic")),
            Some("format") => {
                binary = Some(match t.get(1).copied() {
                    Some("ascii") => false,
                    Some("binary_little_endian") => true,
                    other => {
                        return Err(parse_error(
                            line_no,
                            format!("unsupported PLY format {other:?}"),
                        ))
                    }
                });
            }
            Some("element") => {
                let (name, count) = match (t.get(1), t.get(2).and_then(|c| c.parse().ok())) {
                    (Some(n), Some(c)) => (n.to_string(), c),
                    _ => return Err(parse_error(line_no, "bad element line")),
                };
                elements.push(Element {
                    name,
                    count,
                    props: Vec::new(),
                });
            }
            Some("property") => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| parse_error(line_no, "property before element"))?;
                let prop = if t.get(1) == Some(&"list") {
                    match (
                        t.get(2).and_then(|s| Scalar::parse(s)),
                        t.get(3).and_then(|s| Scalar::parse(s)),
                        t.get(4),
                    ) {
                        (Some(c), Some(i), Some(n)) => Property::List(n.to_string(), c, i),
                        _ => return Err(parse_error(line_no, "bad list property")),
                    }
                } else {
                    match (t.get(1).and_then(|s| Scalar::parse(s)), t.get(2)) {
                        (Some(s), Some(n)) => Property::Scalar(n.to_string(), s),
                        _ => return Err(parse_error(line_no, "bad property")),
                    }
                };
                el.props.push(prop);
            }
            Some("end_header") => break,
            _ => {}
        }
    }
    let binary = binary.ok_or_else(|| parse_error(line_no, "missing format line"))?;

    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut ascii_tokens = if binary {
        None
    } else {
        Some(
            String::from_utf8_lossy(&bytes[pos..])
                .split_whitespace()
                .map(str::to_string)
                .collect::<Vec<_>>()
                .into_iter(),
        )
    };
    let mut read_value = |kind: Scalar, pos: &mut usize| -> Result<f64> {
        match ascii_tokens.as_mut() {
            Some(tokens) => {
                let tok = tokens
                    .next()
                    .ok_or_else(|| parse_error(line_no, "unexpected end of PLY body"))?;
                tok.parse()
                    .map_err(|_| parse_error(line_no, format!("bad PLY value '{tok}'")))
            }
            None => {
                let n = kind.size();
                if *pos + n > bytes.len() {
                    return Err(parse_error(line_no, "unexpected end of PLY body"));
                }
                let v = kind.read_le(&bytes[*pos..*pos + n]);
                *pos += n;
                Ok(v)
            }
        }
    };

    for el in &elements {
        for _ in 0..el.count {
            let mut xyz = [f64::NAN; 3];
            let mut face: Option<Vec<f64>> = None;
            for prop in &el.props {
                match prop {
                    Property::Scalar(name, kind) => {
                        let v = read_value(*kind, &mut pos)?;
                        if el.name == "vertex" {
                            match name.as_str() {
                                "x" => xyz[0] = v,
                                "y" => xyz[1] = v,
                                "z" => xyz[2] = v,
                                _ => {}
                            }
                        }
                    }
                    Property::List(name, count_kind, item_kind) => {
                        let n = read_value(*count_kind, &mut pos)? as usize;
                        let items = (0..n)
                            .map(|_| read_value(*item_kind, &mut pos))
                            .collect::<Result<Vec<_>>>()?;
                        if el.name == "face" && (name == "vertex_indices" || name == "vertex_index")
                        {
                            face = Some(items);
                        }
                    }
                }
            }
            match el.name.as_str() {
                "vertex" => {
                    if xyz.iter().any(|c| c.is_nan()) {
                        return Err(parse_error(line_no, "vertex without x, y, z"));
                    }
                    vertices.push(xyz);
                }
                "face" => {
                    let idx = face.ok_or_else(|| parse_error(line_no, "face without indices"))?;
                    if idx.len() != 3 {
                        return Err(Error::NonTriangularFace { line: line_no });
                    }
                    if idx.iter().any(|&i| i < 0.0) {
                        return Err(parse_error(line_no, "negative face index"));
                    }
                    faces.push([idx[0] as usize, idx[1] as usize, idx[2] as usize]);
                }
                _ => {}
            }
        }
    }
    Ok((vertices, faces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_torus_mesh;
    use crate::mesh::tests::tetrahedron;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn obj_tetrahedron() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "t.obj",
            "# tet\nv 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 3 2\nf 1/1 2/2 4/4\nf 2//1 3//1 4//1\nf -4 -1 -2\n",
        );
        let m = load_mesh(&p, MeshFormat::Obj).unwrap();
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_faces(), 4);
        assert_eq!(m.faces[3], [0, 3, 2]);
    }

    #[test]
    fn obj_quad_rejected_with_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "q.obj",
            "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n",
        );
        let err = load_mesh(&p, MeshFormat::Obj).unwrap_err();
        assert!(matches!(err, Error::NonTriangularFace { line: 5 }));
        assert_eq!(err.to_string(), "non-triangular face at line 5");
    }

    #[test]
    fn non_manifold_edge_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "nm.obj",
            "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 -1 0\nv 0 0 1\nf 1 2 3\nf 2 1 4\nf 1 2 5\n",
        );
        assert!(matches!(
            load_mesh(&p, MeshFormat::Obj),
            Err(Error::NonManifoldEdge {
                a: 0,
                b: 1,
                count: 3,
                ..
            })
        ));
    }

    #[test]
    fn obj_writer_records() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.obj");
        save_mesh(&tetrahedron(), &p, MeshFormat::Obj, None).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 4);

        let uv = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        save_mesh(&tetrahedron(), &p, MeshFormat::Obj, Some(&uv)).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("vt ")).count(), 4);
        assert!(text.lines().any(|l| l == "f 1/1 3/3 2/2"));
    }

    #[test]
    fn round_trips_are_bit_exact() {
        let (m, _) = generate_torus_mesh(3.0, 1.0, 8, 8).unwrap();
        let dir = tempfile::tempdir().unwrap();
        for (name, fmt) in [
            ("a.obj", MeshFormat::Obj),
            ("a.ply", MeshFormat::Ply),
            ("b.ply", MeshFormat::PlyBinary),
        ] {
            let p = dir.path().join(name);
            save_mesh(&m, &p, fmt, None).unwrap();
            let back = load_mesh(&p, fmt).unwrap();
            assert_eq!(back.vertices, m.vertices, "{name}");
            assert_eq!(back.faces, m.faces, "{name}");
        }
    }

    #[test]
    fn ply_with_extra_properties() {
        let dir = tempfile::tempdir().unwrap();
        let body = "ply\nformat ascii 1.0\ncomment x\nelement vertex 4\nproperty float x\nproperty float y\nproperty float z\nproperty uchar red\nelement face 4\nproperty list uchar uint vertex_index\nend_header\n0 0 0 1\n1 0 0 1\n0 1 0 1\n0 0 1 1\n3 0 2 1\n3 0 1 3\n3 1 2 3\n3 0 3 2\n";
        let p = write(&dir, "t.ply", body);
        let m = load_mesh(&p, MeshFormat::Ply).unwrap();
        assert_eq!(m.faces, tetrahedron().faces);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let p = Path::new("/nonexistent-dir/x.obj");
        assert!(matches!(
            save_mesh(&tetrahedron(), p, MeshFormat::Obj, None),
            Err(Error::Io { .. })
        ));
    }
}
