from glassbox.cli.config import (DATASETS_DIR, FEATURES_DIR, MODELS_DIR, EXPLANATIONS_DIR, REPORTS_DIR, REGENERATED_DIR,
EMBEDDINGS, TABLE1, ABLATION, STABILITY, DESK)
from glassbox.cli.views import (SimulateArgs, FeaturizeArgs, FitArgs, ExplainArgs, EvalArgs, ReportArgs, TransformerArgs,
RunConfig)
from glassbox.cli.registry import Command
from glassbox.simulation import SimConfig, SubjectDataset, simulate
from glassbox.features import featurize
from glassbox.features.config import RAW, FEATURIZED
from glassbox.interpretable import cv_lambda_path, fit_tree, MajorityClassifier, SparseLogisticFit, DecisionTreeFit, accuracy
from glassbox.transformer import TransformerConfig, TrainedTransformer, train
from glassbox.transformer.config import PLAIN, CBM as CBM_MODE
from glassbox.explain import (EmbeddingSet, GlassboxTrajectoryModel, explain_samples, resolve_baseline, extract_embeddings,
project, interpolation_probe, pdp)
from glassbox.explain.config import INTEGRATED_GRADIENTS, OCCLUSION, TOKEN_POOLING
from glassbox.explain import render
from glassbox.evalbench import (Table1Config, AblationConfig, EvalReport, run_table1, ablation_benchmark, run_stability,
ground_truth_faithfulness, learner_for, machine_descriptor)
from glassbox.evalbench.config import SPARSE_LOGISTIC, TREE, CBM, MODELS, SEQUENCE_MODELS
from glassbox.store import (read_artifact, read_manifest, save_dataset, load_dataset, save_features, save_glassbox_model,
save_transformer, load_model, save_attributions, load_attributions, save_embeddings, load_embeddings, load_probe, save_pdp, load_pdp,
save_report, load_report, LoadedModel)
from glassbox.store.config import DATASET, FEATURES, MODEL, ATTRIBUTIONS, EMBEDDINGS as EMBEDDINGS_KIND, PDP as PDP_KIND, REPORT
from tabulate import tabulate
from pathlib import Path
import numpy as np
import logging

logger = logging.getLogger(__name__)

def _destination(run:RunConfig, folder:str, name:str)->Path:
    return run.out/folder/name

def _dataset_of(loaded:LoadedModel)->tuple[Path,SubjectDataset]:
    path,_=loaded.artifact.upstream(DATASET)
    return path,load_dataset(path)

def transformer_config(args:TransformerArgs, n_species:int, n_timepoints:int, n_concept:int)->TransformerConfig:
    '''Preset sized to the data: token width D, positional table T and one concept per community.'''
    overrides={'n_embd':n_species,'n_positions':n_timepoints,'n_concept':n_concept,'n_head':args.n_head,'seed':args.seed}
    if args.epochs is not None:
        overrides['epochs']=args.epochs
    if args.preset==DESK:
        return TransformerConfig.desk(**overrides)
    return TransformerConfig(**overrides)

@Command('simulate',args_schema=SimulateArgs)
def simulate_command(args:SimulateArgs, run:RunConfig):
    '''
    Simulate subjects from a random trajectory dictionary and store them as a dataset artifact.
    '''
    config=SimConfig(n_subjects=args.n,n_timepoints=args.timepoints,n_species=args.species,
        n_communities=args.communities,seed=args.seed)
    dataset=simulate(config)
    name=args.name or f'sim-n{args.n}-seed{args.seed}'
    path=save_dataset(dataset,_destination(run,DATASETS_DIR,name),fmt=args.format,overwrite=run.overwrite)
    manifest=read_manifest(path)
    content=f"Dataset {path} ({manifest.content_hash[:12]})\n\n{dataset.summary().to_string()}"
    return content,[path]

@Command('featurize',args_schema=FeaturizeArgs)
def featurize_command(args:FeaturizeArgs, run:RunConfig):
    '''
    Build the raw or trend/curvature feature matrix of a dataset artifact.
    '''
    dataset_path=Path(args.dataset)
    dataset=load_dataset(dataset_path)
    matrix=featurize(dataset,args.representation,standardized=args.standardized)
    name=args.name or f'{dataset_path.name}-{args.representation}'
    path=save_features(matrix,_destination(run,FEATURES_DIR,name),dataset_path,fmt=args.format,overwrite=run.overwrite)
    flat=int(matrix.zero_variance.sum())
    return f"Features {path}: {matrix.n_rows} x {matrix.n_features} ({args.representation}, {flat} zero-variance)",[path]

def _fit_glassbox(args:FitArgs, dataset:SubjectDataset, representation:str):
    matrix=featurize(dataset,representation)
    train_mask,val_mask=dataset.train_mask,dataset.val_mask
    X_train,y_train=matrix.values[train_mask],dataset.y[train_mask]
    if args.model==SPARSE_LOGISTIC:
        fit=cv_lambda_path(X_train,y_train,n_folds=args.n_folds,n_lambda=args.n_lambda,seed=args.seed,
            feature_names=matrix.feature_names)
        size=f'{fit.n_active} active features'
    elif args.model==TREE:
        fit=fit_tree(X_train,y_train,seed=args.seed,feature_names=matrix.feature_names)
        size=f'{fit.n_splits} splits'
    else:
        fit=MajorityClassifier.fit(X_train,y_train)
        size='no features'
    scores=(accuracy(fit,X_train,y_train),accuracy(fit,matrix.values[val_mask],dataset.y[val_mask]))
    return fit,scores,size

@Command('fit',args_schema=FitArgs)
def fit_command(args:FitArgs, run:RunConfig):
    '''
    Fit a glass-box or sequence model on a dataset artifact and store it as a model artifact.
    '''
    dataset_path=Path(args.dataset)
    dataset=load_dataset(dataset_path)
    sequence=args.model in SEQUENCE_MODELS
    representation=args.representation or (RAW if sequence else FEATURIZED)
    if sequence and representation!=RAW:
        raise ValueError(f"Model '{args.model}' consumes the raw token representation, got '{representation}'")
    name=args.name or f'{dataset_path.name}-{args.model}-{representation}'
    destination=_destination(run,MODELS_DIR,name)
    if sequence:
        config=transformer_config(args,dataset.n_species,dataset.n_timepoints,dataset.concepts.shape[1])
        trained=train(CBM_MODE if args.model==CBM else PLAIN,dataset,config)
        path=save_transformer(trained,destination,dataset_path,overwrite=run.overwrite)
        val_mask=dataset.val_mask
        lines=[f"Model {path}: {args.model}, {len(trained.log)} epochs in {trained.train_seconds:.1f}s",
            f"Validation accuracy {trained.accuracy(dataset.X[val_mask],dataset.y[val_mask]):.3f}"]
        if trained.mode==CBM_MODE and val_mask.any():
            lines.append(f"Validation concept AUC {trained.concept_auc(dataset.X[val_mask],dataset.concepts[val_mask]):.3f}")
        return '\n'.join(lines),[path]
    fit,(in_sample,out_sample),size=_fit_glassbox(args,dataset,representation)
    path=save_glassbox_model(fit,destination,dataset_path,representation,overwrite=run.overwrite)
    return (f"Model {path}: {args.model} on {representation}, {size}\n"
        f"In-sample accuracy {in_sample:.3f}, out-of-sample accuracy {out_sample:.3f}"),[path]

def _trajectory_model(loaded:LoadedModel, dataset:SubjectDataset):
    '''Attribution target and the standardized (N, T, D) trajectories it scores.'''
    if loaded.is_transformer:
        return loaded.fit,loaded.fit.standardize(dataset.X)
    if loaded.name==SPARSE_LOGISTIC and loaded.representation==RAW:
        matrix=featurize(dataset,RAW)
        N,T,D=dataset.X.shape
        return GlassboxTrajectoryModel(loaded.fit,T,D),matrix.values.reshape(N,T,D)
    raise ValueError(f"Attributions need a transformer or a sparse logistic model on the raw representation, "
        f"got {loaded.name} on {loaded.representation}")

def _feature_index(matrix_names:list[str], feature:str)->int:
    if feature.isdigit():
        return int(feature)
    if feature not in matrix_names:
        raise ValueError(f"Unknown feature '{feature}'")
    return matrix_names.index(feature)

def _default_pdp_feature(fit)->int:
    if isinstance(fit,SparseLogisticFit) and fit.n_active:
        return int(np.argmax(np.abs(fit.beta)))
    if isinstance(fit,DecisionTreeFit) and fit.n_splits:
        return int(fit.root.feature)
    return 0

@Command('explain',args_schema=ExplainArgs)
def explain_command(args:ExplainArgs, run:RunConfig):
    '''
    Explain a stored model: attributions, embeddings with sparse PCA, or partial dependence profiles.
    '''
    model_path=Path(args.model)
    loaded=load_model(model_path)
    _,dataset=_dataset_of(loaded)
    name=args.name or f'{model_path.name}-{args.method}'
    destination=_destination(run,EXPLANATIONS_DIR,name)
    if args.method in (INTEGRATED_GRADIENTS,OCCLUSION):
        out_of_range=[sample for sample in args.samples if sample>=dataset.n_subjects]
        if out_of_range:
            raise ValueError(f"Sample ids {out_of_range} out of range for {dataset.n_subjects} subjects")
        model,Z=_trajectory_model(loaded,dataset)
        baseline=resolve_baseline(args.baseline,Z,dataset.train_mask)
        targets=[args.target_class]*len(args.samples) if args.target_class is not None else dataset.y[args.samples]
        attributions=explain_samples(model,Z,args.samples,args.method,target_classes=targets,baseline=baseline,
            n_steps=args.n_steps,window=args.window,baseline_name=args.baseline)
        path=save_attributions(attributions,destination,model_path,heatmaps=args.figures,
            config=args.model_dump(mode='json'),overwrite=run.overwrite)
        table=[[a.sample_id,a.target_class,f'{a.prediction:.3f}',f'{a.baseline_prediction:.3f}',
            '' if a.completeness_gap is None else f'{a.completeness_gap:.2e}'] for a in attributions]
        summary=tabulate(table,headers=['Sample','Target','Score','Baseline score','Completeness gap'],tablefmt='simple')
        return f"Attributions {path} ({args.method}, {len(attributions)} samples)\n\n{summary}",[path]
    if args.method==EMBEDDINGS:
        ids=np.arange(dataset.n_subjects)
        if loaded.is_transformer:
            embeddings=extract_embeddings(loaded.fit,dataset.X,layer=args.layer,pooling=args.pooling,
                species=args.species,sample_ids=ids)
        else:
            embeddings=EmbeddingSet(layer='raw',pooling=TOKEN_POOLING,vectors=featurize(dataset,RAW).values,sample_ids=ids)
        embeddings=project(embeddings,args.n_components,args.sparsity_penalty)
        probe=interpolation_probe(embeddings,*args.probe) if args.probe else None
        path=save_embeddings(embeddings,dataset.y,destination,model_path,probe=probe,overwrite=run.overwrite)
        variances=', '.join(f'{value:.3f}' for value in embeddings.explained_variance)
        return (f"Embeddings {path}: layer {embeddings.layer}, {embeddings.n_samples} subjects, "
            f"component variances {variances}, loading sparsity {embeddings.loadings_sparsity:.2f}"),[path]
    if loaded.is_transformer:
        raise ValueError("Partial dependence is computed for glass-box models")
    matrix=featurize(dataset,loaded.representation)
    indices=[_feature_index(matrix.feature_names,feature) for feature in args.features] or [_default_pdp_feature(loaded.fit)]
    profiles=[pdp(loaded.fit,matrix.values,d,feature_name=matrix.feature_names[d],resolution=args.resolution)
        for d in indices]
    path=save_pdp(profiles,destination,model_path,overwrite=run.overwrite)
    lines=[f"{profile.feature_name}: {profile.profile.min():.3f} .. {profile.profile.max():.3f} over "
        f"{len(profile.grid)} grid points" for profile in profiles]
    return f"Partial dependence {path}\n"+'\n'.join(lines),[path]

def _eval_dataset(args:EvalArgs)->SubjectDataset:
    if args.dataset is not None:
        return load_dataset(args.dataset)
    return simulate(SimConfig(n_subjects=args.n[0],seed=args.seeds[0]))

def _ablation_config(args:EvalArgs, dataset:SubjectDataset)->AblationConfig:
    return AblationConfig(q=args.q,model=args.model,method=args.method,n_steps=args.n_steps,window=args.window,
        n_samples=args.n_samples,transformer=transformer_config(args,dataset.n_species,dataset.n_timepoints,
        dataset.concepts.shape[1]),n_folds=args.n_folds,n_lambda=args.n_lambda,seed=args.seeds[0])

def _faithfulness(args:EvalArgs)->tuple[EvalReport,list[str]]:
    if args.attributions is not None:
        attributions=load_attributions(args.attributions)
        dataset_path,_=read_artifact(args.attributions).upstream(DATASET)
        dataset=load_dataset(dataset_path)
        occlusions=load_attributions(args.occlusions) if args.occlusions else None
        upstream=[args.attributions]+([args.occlusions] if args.occlusions else [])
    else:
        dataset=_eval_dataset(args)
        base=learner_for(_ablation_config(args,dataset))(dataset)
        subjects=[int(s) for s in np.flatnonzero(dataset.val_mask)[:args.n_samples]]
        Z=base.standardize(dataset.X)
        attributions=explain_samples(base.model,Z,subjects,INTEGRATED_GRADIENTS,n_steps=args.n_steps)
        occlusions=explain_samples(base.model,Z,subjects,OCCLUSION,window=args.window)
        upstream=[args.dataset] if args.dataset else []
    score=ground_truth_faithfulness(attributions,dataset,occlusions,k=args.k,n_shuffles=args.n_shuffles,
        seed=args.seeds[0])
    report=EvalReport(machine=machine_descriptor(),suite=args.suite,config=args.model_dump(mode='json'),
        faithfulness=[score])
    return report,upstream

@Command('eval',args_schema=EvalArgs)
def eval_command(args:EvalArgs, run:RunConfig):
    '''
    Run an evaluation suite (table1, ablation, stability or faithfulness) and store its report.
    '''
    upstream=[]
    if args.suite==TABLE1:
        sim=SimConfig()
        config=Table1Config(n_list=tuple(args.n),seeds=tuple(args.seeds),models=tuple(args.models or MODELS),
            representations=tuple(args.representations),sim=sim,
            transformer=transformer_config(args,sim.n_species,sim.n_timepoints,sim.n_communities),
            n_folds=args.n_folds,n_lambda=args.n_lambda)
        report=run_table1(config)
    elif args.suite==ABLATION:
        dataset=_eval_dataset(args)
        config=_ablation_config(args,dataset)
        record=ablation_benchmark(dataset,config=config)
        report=EvalReport(machine=machine_descriptor(),suite=args.suite,config=config.model_dump(mode='json'),
            ablations=[record])
        upstream=[args.dataset] if args.dataset else []
    elif args.suite==STABILITY:
        report=run_stability(SimConfig(n_subjects=args.n[0]),seeds=tuple(args.seeds),
            representations=tuple(args.representations),n_folds=args.n_folds,n_lambda=args.n_lambda)
    else:
        report,upstream=_faithfulness(args)
    sizes='-'.join(str(n) for n in args.n)
    seeds='-'.join(str(seed) for seed in args.seeds)
    name=args.name or f'{args.suite}-n{sizes}-seed{seeds}'
    path=save_report(report,_destination(run,REPORTS_DIR,name),upstream=upstream,overwrite=run.overwrite)
    return f"Report {path}\n\n{report.render()}",[path]

def _regenerate(path:Path, target:Path, figures:bool)->tuple[str,list[Path]]:
    artifact=read_artifact(path)
    written=[]
    if artifact.kind==REPORT:
        report=load_report(path)
        text=report.render()
        (target/'table.txt').write_text(text+'\n',encoding='utf-8')
        return text,[target/'table.txt']
    if artifact.kind==ATTRIBUTIONS:
        attributions=load_attributions(path)
        if figures:
            dataset_path,_=artifact.upstream(DATASET)
            dataset=load_dataset(dataset_path,verify=False)
            for a in attributions:
                written.append(render.attribution_heatmap(a,target/f'sample_{a.sample_id}.svg'))
                written.append(render.trajectory_overlay(a,dataset,target/f'trajectories_{a.sample_id}.svg'))
        table=[[a.sample_id,a.method,f'{a.prediction:.3f}',float(np.abs(a.values).max())] for a in attributions]
        return tabulate(table,headers=['Sample','Method','Score','Max |attribution|'],tablefmt='simple'),written
    if artifact.kind==EMBEDDINGS_KIND:
        embeddings=load_embeddings(path)
        dataset_path,_=artifact.upstream(DATASET)
        dataset=load_dataset(dataset_path,verify=False)
        labels=dataset.y[embeddings.sample_ids]
        if figures and embeddings.scores is not None:
            written.append(render.embedding_scatter(embeddings,labels,target/'scatter.svg'))
        probe=load_probe(path)
        if figures and probe:
            written.append(render.interpolation_trajectories(probe,dataset,target/'probe_trajectories.svg'))
        return f"Embeddings: layer {embeddings.layer}, {embeddings.n_samples} subjects",written
    if artifact.kind==PDP_KIND:
        profiles=load_pdp(path)
        if figures:
            written=[render.pdp_profile(profile,target/f'feature_{profile.feature}.svg') for profile in profiles]
        return '\n'.join(f'{p.feature_name}: {len(p.grid)} grid points' for p in profiles),written
    if artifact.kind==MODEL:
        loaded=load_model(path)
        if isinstance(loaded.fit,SparseLogisticFit):
            if figures and loaded.fit.path_coefficients is not None:
                written=[render.coefficient_path(loaded.fit,target/'coefficient_path.svg')]
            rows=loaded.fit.coefficient_table()
            return tabulate(rows,headers=['Feature','Coefficient'],tablefmt='simple') if rows else 'No active features',written
        if isinstance(loaded.fit,DecisionTreeFit):
            (target/'rules.txt').write_text(loaded.fit.describe()+'\n',encoding='utf-8')
            return loaded.fit.describe(),[target/'rules.txt']
        if isinstance(loaded.fit,TrainedTransformer):
            rows=[row.to_dict() for row in loaded.fit.log]
            return tabulate(rows,headers='keys',tablefmt='simple',floatfmt='.4f'),written
        return f"Majority classifier, class-1 rate {loaded.fit.probability:.3f}",written
    if artifact.kind==DATASET:
        return load_dataset(path).summary().to_string(),written
    if artifact.kind==FEATURES:
        return f"Features: {artifact.manifest.summary}",written
    raise ValueError(f"Nothing to regenerate for a {artifact.kind} artifact")

@Command('report',args_schema=ReportArgs)
def report_command(args:ReportArgs, run:RunConfig):
    '''
    Regenerate tables and figures from stored artifacts without refitting anything.
    '''
    sections,written=[],[]
    for item in args.artifacts:
        path=Path(item)
        target=_destination(run,REGENERATED_DIR,args.name or path.name)
        target.mkdir(parents=True,exist_ok=True)
        text,files=_regenerate(path,target,args.figures)
        sections.append(f"{path}\n\n{text}")
        written.extend(files)
    return '\n\n'.join(sections),written

COMMANDS=[simulate_command,featurize_command,fit_command,explain_command,eval_command,report_command]
